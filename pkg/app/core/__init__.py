"""配置、日志、错误与并行执行."""
