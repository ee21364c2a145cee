"""计算服务."""
