"""
Pipeline stages and the runner that chains them.

A stage is a named step with its own logger; the runner registers stages,
initializes them, runs them in order and cleans them up.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional


@dataclass
class StageConfig:
    """Configuration for a pipeline stage."""
    name: str
    description: str
    enabled: bool = True


class Stage:
    """Base pipeline stage."""

    def __init__(self, config: StageConfig):
        self.config = config
        self.logger = logging.getLogger(f"stage.{config.name}")
        self.is_initialized = False
        self.is_running = False

    @property
    def name(self) -> str:
        return self.config.name

    def initialize(self):
        """Initialize the stage."""
        self.is_initialized = True
        self.log_debug(f"Stage {self.config.name} initialized")

    def run(self, state):
        """Run the stage on the pipeline state and return the new state."""
        raise NotImplementedError

    def cleanup(self):
        """Cleanup stage resources."""
        self.is_running = False
        self.log_debug(f"Stage {self.config.name} cleaned up")

    def log_info(self, message: str):
        """Log info message."""
        self.logger.info(f"[{self.config.name}] {message}")

    def log_warning(self, message: str):
        """Log warning message."""
        self.logger.warning(f"[{self.config.name}] {message}")

    def log_error(self, message: str):
        """Log error message."""
        self.logger.error(f"[{self.config.name}] {message}")

    def log_debug(self, message: str):
        """Log debug message."""
        self.logger.debug(f"[{self.config.name}] {message}")


class PipelineRunner:
    """Runs registered stages in registration order."""

    def __init__(self):
        self.stages: Dict[str, Stage] = {}
        self.logger = logging.getLogger("runner")
        self.is_initialized = False

    def register_stage(self, stage: Stage):
        """Register a stage with the runner."""
        self.stages[stage.name] = stage
        self.logger.debug(f"Registered stage: {stage.name}")

    def initialize(self):
        """Initialize all registered stages."""
        for stage_name, stage in self.stages.items():
            try:
                stage.initialize()
            except Exception as e:
                self.logger.error(f"Failed to initialize stage {stage_name}: {e}")
                raise
        self.is_initialized = True

    def shutdown(self):
        """Cleanup all stages."""
        for stage_name, stage in self.stages.items():
            try:
                stage.cleanup()
            except Exception as e:
                self.logger.warning(f"Error cleaning up stage {stage_name}: {e}")
        self.is_initialized = False

    def get_stage(self, name: str) -> Optional[Stage]:
        """Get a stage by name."""
        return self.stages.get(name)

    def list_stages(self) -> List[str]:
        """List all registered stage names."""
        return list(self.stages.keys())

    def enabled_stages(self) -> List[Stage]:
        return [s for s in self.stages.values() if s.config.enabled]
