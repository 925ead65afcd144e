from .scan import ScanPoint, ScanResult, ScanSpec, beta_scan, sigma_scan, target_task

__all__ = ["ScanPoint", "ScanResult", "ScanSpec", "beta_scan", "sigma_scan", "target_task"]
