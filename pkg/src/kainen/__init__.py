"""Embeddings of graphs in closed surfaces and drawings meeting Kainen's crossing bound."""
from .drawings import Drawing, verify_drawing, verify_kainen
from .surfaces import Embedding, EmbeddingError, Graph, RotationSystem, SurfaceId, from_faces, trace_faces

__all__ = [
    "Drawing",
    "Embedding",
    "EmbeddingError",
    "Graph",
    "RotationSystem",
    "SurfaceId",
    "from_faces",
    "trace_faces",
    "verify_drawing",
    "verify_kainen",
]
