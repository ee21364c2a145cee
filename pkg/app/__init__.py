"""spqr-lab - 六映射自相似系统 S_pqr 的重叠认证与维数实验."""
