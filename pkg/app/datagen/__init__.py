from app.datagen.generator import generate, generate_table, write_generated
from app.datagen.render import render_segmap
from app.datagen.statistics import dataset_statistics


__all__ = [
    "generate",
    "generate_table",
    "write_generated",
    "render_segmap",
    "dataset_statistics",
]
