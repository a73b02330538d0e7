from app.transform.export import parse_xml, to_adjacency_json, to_csv, to_html, to_xml
from app.transform.grid import LogicalGrid, from_grid, same_axis_matrix, to_grid


__all__ = [
    "LogicalGrid",
    "to_grid",
    "from_grid",
    "same_axis_matrix",
    "to_csv",
    "to_xml",
    "parse_xml",
    "to_html",
    "to_adjacency_json",
]
