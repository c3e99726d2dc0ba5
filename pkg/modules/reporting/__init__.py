# modules/reporting/__init__.py

from .pdf_generator import generate_pdf_report
from .detection_report import (
    build_detection_report,
    detection_summary_text,
    fmt6,
    load_any_report,
    power_summary_text,
    render_pdf,
    summary_text,
    write_detection_report,
)

__all__ = [
    "generate_pdf_report",
    "build_detection_report",
    "detection_summary_text",
    "fmt6",
    "load_any_report",
    "power_summary_text",
    "render_pdf",
    "summary_text",
    "write_detection_report",
]
