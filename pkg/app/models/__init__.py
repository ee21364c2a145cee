"""Pydantic 数据模型."""
