"""Artifact rendering and persistence."""

from .artifacts import (
    ArtifactWriter,
    format_number,
    read_vector_csv,
    render_csv,
    render_json,
    render_matrix_csv,
)

__all__ = [
    "ArtifactWriter",
    "format_number",
    "read_vector_csv",
    "render_csv",
    "render_json",
    "render_matrix_csv",
]
