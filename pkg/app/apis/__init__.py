"""命令行层：公共依赖与子命令."""
