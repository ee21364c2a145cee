"""v1 子命令."""
