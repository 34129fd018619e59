import json
import logging
from datetime import datetime
from typing import Any, Dict, Optional

from config import Config
from models.report import Report
from stages import Stage, StageConfig


class ReportLogger(Stage):
    """Structured run log: one JSON line per command plus a session summary."""

    def __init__(self, log_file: Optional[str] = None):
        config = StageConfig(
            name="report_logger",
            description="Appends command outcomes to the run log"
        )
        super().__init__(config)
        self.log_file_path = log_file or Config.LOG_FILE
        self.session_stats = {
            "start_time": datetime.now(),
            "runs": 0,
            "failures": {},
            "stage_seconds": {},
        }

    def initialize(self):
        """Initialize logging system."""
        logging.basicConfig(
            level=getattr(logging, Config.LOG_LEVEL.upper()),
            format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
        )
        super().initialize()

    def log_run(self, path: str, report: Report, seconds: float):
        """Append one command outcome to the log file."""
        try:
            log_entry = {
                "timestamp": datetime.now().isoformat(),
                "command": report.command,
                "path": path,
                "input_digest": report.input_digest,
                "status": report.status,
                "exit_code": report.exit_code,
                "seconds": round(seconds, 3),
            }
            if report.error:
                log_entry["error"] = report.error

            with open(self.log_file_path, 'a', encoding='utf-8') as f:
                f.write(json.dumps(log_entry) + '\n')

            self.session_stats["runs"] += 1
            if report.exit_code:
                code = str(report.exit_code)
                self.session_stats["failures"][code] = self.session_stats["failures"].get(code, 0) + 1
            for record in report.stages:
                name = record.get("stage")
                if name and "seconds" in record:
                    totals = self.session_stats["stage_seconds"]
                    totals[name] = totals.get(name, 0.0) + record["seconds"]

            self.log_debug(f"Logged {report.command} on {path}: {report.status}")

        except OSError as e:
            self.log_error(f"Failed to write run log: {e}")

    def log_summary(self) -> Optional[Dict[str, Any]]:
        """Append the session summary to the log file and return it."""
        try:
            end_time = datetime.now()
            session_duration = (end_time - self.session_stats["start_time"]).total_seconds()
            summary = {
                "timestamp": end_time.isoformat(),
                "session_type": "summary",
                "session_duration_seconds": round(session_duration, 2),
                "total_runs": self.session_stats["runs"],
                "failures_by_exit_code": dict(self.session_stats["failures"]),
                "stage_seconds": {k: round(v, 3) for k, v in self.session_stats["stage_seconds"].items()},
            }

            with open(self.log_file_path, 'a', encoding='utf-8') as f:
                f.write(json.dumps(summary) + '\n')

            self.log_info(f"Session summary logged: {self.session_stats['runs']} run(s)")
            return summary

        except OSError as e:
            self.log_error(f"Failed to log summary: {e}")
            return None

    def get_session_stats(self) -> Dict[str, Any]:
        """Get current session statistics."""
        return self.session_stats.copy()
