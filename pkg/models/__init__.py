# Problem and report files
