from .persistence import (
    EditPayload,
    GeocoderService,
    LoadReport,
    ResultRecord,
    RuidMismatchError,
    UnknownRecordError,
)

__all__ = [
    "EditPayload",
    "GeocoderService",
    "LoadReport",
    "ResultRecord",
    "RuidMismatchError",
    "UnknownRecordError",
]
