from ragstack.vector_index.index import SearchHit, VectorIndex, cosine_similarity

__all__ = ["SearchHit", "VectorIndex", "cosine_similarity"]
