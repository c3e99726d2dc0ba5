# modules/reporting/pdf_generator.py

import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Union

from reportlab.lib import colors
from reportlab.lib.pagesizes import A4, landscape
from reportlab.lib.styles import ParagraphStyle, getSampleStyleSheet
from reportlab.platypus import Paragraph, SimpleDocTemplate, Spacer, Table, TableStyle

logger = logging.getLogger(__name__)

styles = getSampleStyleSheet()
custom_style = ParagraphStyle('CustomNormal', parent=styles['Normal'], spaceAfter=6, fontSize=9)

TABLE_STYLE = TableStyle([
    ('BACKGROUND', (0, 0), (-1, 0), colors.grey),
    ('TEXTCOLOR', (0, 0), (-1, 0), colors.whitesmoke),
    ('ALIGN', (0, 0), (-1, -1), 'CENTER'),
    ('FONTNAME', (0, 0), (-1, 0), 'Helvetica-Bold'),
    ('FONTSIZE', (0, 0), (-1, -1), 8),
    ('BOTTOMPADDING', (0, 0), (-1, 0), 8),
    ('BACKGROUND', (0, 1), (-1, -1), colors.beige),
    ('GRID', (0, 0), (-1, -1), 0.5, colors.black),
])


def generate_pdf_report(
        path: Union[str, Path],
        title: str,
        author: str,
        content_data: List[Dict[str, Any]],
        cover_text: str = "",
) -> Path:
    """
    Genera un PDF a partir de bloques {"type": heading|paragraph|table, "content": ...}.
    :param path: Ruta del fichero .pdf
    :param title: Título del documento
    :param author: Autor / herramienta
    :param content_data: Bloques de contenido; las tablas son listas de filas (cabecera primero)
    :param cover_text: Aviso opcional bajo la cabecera
    :return: Ruta al PDF generado
    """
    full_path = Path(path)
    full_path.parent.mkdir(parents=True, exist_ok=True)
    logger.info("Generando informe PDF | path=%s | bloques=%s", full_path, len(content_data))

    pdf_doc = SimpleDocTemplate(str(full_path), pagesize=landscape(A4))
    story = [Paragraph(title, styles['Title']), Spacer(1, 12)]

    today = datetime.now().strftime("%d/%m/%Y %H:%M")
    story.append(Paragraph(f"Autor: {author} | Generado el: {today}", custom_style))
    story.append(Spacer(1, 12))

    if cover_text:
        story.append(Paragraph(cover_text, styles['Heading3']))
        story.append(Spacer(1, 12))

    for block in content_data:
        block_type = str(block.get("type", "unknown")).lower()
        block_content = block.get("content", "Sin contenido.")

        if block_type == "heading":
            story.append(Paragraph(block_content, styles['Heading2']))
            story.append(Spacer(1, 8))
        elif block_type == "table":
            table = Table([[str(cell) for cell in row] for row in block_content], repeatRows=1)
            table.setStyle(TABLE_STYLE)
            story.append(table)
            story.append(Spacer(1, 12))
        else:
            story.append(Paragraph(str(block_content), custom_style))
            story.append(Spacer(1, 6))

    pdf_doc.build(story)
    logger.info("Informe PDF generado | path=%s", full_path)
    return full_path
