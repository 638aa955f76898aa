from ragstack.storage.blob import (
    BlobStore,
    FSBlobStore,
    ObjectRef,
    S3BlobStore,
    blob_store_from_env,
)
from ragstack.storage.metadata import MetadataRecord, MetadataStore

__all__ = [
    "BlobStore",
    "FSBlobStore",
    "MetadataRecord",
    "MetadataStore",
    "ObjectRef",
    "S3BlobStore",
    "blob_store_from_env",
]
