from .artifacts import CodeTableCampaign, ExportNetlistCampaign, SchemasCampaign, resolve_unit
from .base import BaseCampaign
from .bench import LinearBenchCampaign
from .mlp import MlpDemoCampaign, mlp_forward
from .report import Report
from .scan import ScanCampaign
from .verify import VerifyAddCampaign, VerifyMulCampaign

__all__ = [
    "BaseCampaign",
    "CodeTableCampaign",
    "ExportNetlistCampaign",
    "LinearBenchCampaign",
    "MlpDemoCampaign",
    "Report",
    "ScanCampaign",
    "SchemasCampaign",
    "VerifyAddCampaign",
    "VerifyMulCampaign",
    "mlp_forward",
    "resolve_unit",
]
