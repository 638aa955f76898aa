"""Blob store: substitutable platform module.

Two implementations behind one interface: a filesystem reference store
(directory per bucket, write-to-temp-then-rename for atomic overwrite) and a
client for any S3-compatible server speaking path-style GET/PUT/DELETE/LIST.
Backend selection is configuration-only via STORAGE_BACKEND.
"""

from __future__ import annotations

import hashlib
import os
import re
import tempfile
import threading
from dataclasses import dataclass
from typing import Protocol
from urllib.parse import quote
from xml.etree import ElementTree

import httpx

from ragstack.errors import NotFound, StorageUnavailable

_KEY_RE = re.compile(r"^[A-Za-z0-9._/\-]+$")


@dataclass(frozen=True)
class ObjectRef:
    bucket: str
    key: str
    etag: str
    size_bytes: int


def _etag(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


class BlobStore(Protocol):
    def put_object(self, bucket: str, key: str, data: bytes) -> ObjectRef: ...

    def get_object(self, bucket: str, key: str) -> bytes: ...

    def delete_object(self, bucket: str, key: str) -> None: ...

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectRef]: ...


def _check_key(key: str) -> None:
    if not key or not _KEY_RE.match(key) or ".." in key or key.startswith("/"):
        raise StorageUnavailable(f"invalid object key: {key!r}")


class FSBlobStore:
    """Directory-per-bucket store; atomic overwrite via temp file + rename."""

    def __init__(self, root: str):
        self.root = root
        os.makedirs(root, exist_ok=True)
        self._lock = threading.Lock()

    def _bucket_dir(self, bucket: str, create: bool = False) -> str:
        if not _KEY_RE.match(bucket) or "/" in bucket:
            raise StorageUnavailable(f"invalid bucket name: {bucket!r}")
        path = os.path.join(self.root, bucket)
        if create:
            os.makedirs(path, exist_ok=True)
        return path

    def _path(self, bucket: str, key: str, create_bucket: bool = False) -> str:
        _check_key(key)
        return os.path.join(self._bucket_dir(bucket, create_bucket), *key.split("/"))

    def put_object(self, bucket: str, key: str, data: bytes) -> ObjectRef:
        path = self._path(bucket, key, create_bucket=True)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix=".tmp-")
        try:
            with os.fdopen(fd, "wb") as fh:
                fh.write(data)
            os.replace(tmp, path)
        except OSError as exc:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise StorageUnavailable(str(exc)) from exc
        return ObjectRef(bucket, key, _etag(data), len(data))

    def get_object(self, bucket: str, key: str) -> bytes:
        path = self._path(bucket, key)
        try:
            with open(path, "rb") as fh:
                return fh.read()
        except FileNotFoundError:
            raise NotFound(f"{bucket}/{key}") from None
        except OSError as exc:
            raise StorageUnavailable(str(exc)) from exc

    def delete_object(self, bucket: str, key: str) -> None:
        path = self._path(bucket, key)
        try:
            os.unlink(path)
        except FileNotFoundError:
            raise NotFound(f"{bucket}/{key}") from None

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectRef]:
        bucket_dir = self._bucket_dir(bucket)
        if not os.path.isdir(bucket_dir):
            return []
        refs = []
        for dirpath, _dirs, files in os.walk(bucket_dir):
            for name in files:
                if name.startswith(".tmp-"):
                    continue
                full = os.path.join(dirpath, name)
                key = os.path.relpath(full, bucket_dir).replace(os.sep, "/")
                if not key.startswith(prefix):
                    continue
                with open(full, "rb") as fh:
                    data = fh.read()
                refs.append(ObjectRef(bucket, key, _etag(data), len(data)))
        refs.sort(key=lambda r: r.key)
        return refs


class S3BlobStore:
    """Client for an S3-compatible endpoint (path-style addressing).

    Speaks the minimal subset: PUT/GET/DELETE object and ListObjectsV2.
    Credentials are sent as a bearer-style access key pair; SigV4 signing is
    a deployment concern handled by real S3 SDKs behind the same interface.
    """

    def __init__(self, endpoint: str, access_key: str = "", secret_key: str = "",
                 client: httpx.Client | None = None):
        self.endpoint = endpoint.rstrip("/")
        headers = {}
        if access_key:
            headers["Authorization"] = f"AWS {access_key}:{secret_key}"
        self._client = client or httpx.Client(headers=headers, timeout=10.0)
        if client is not None and access_key:
            client.headers.update(headers)

    def _url(self, bucket: str, key: str = "") -> str:
        url = f"{self.endpoint}/{quote(bucket)}"
        if key:
            url += "/" + quote(key)
        return url

    def put_object(self, bucket: str, key: str, data: bytes) -> ObjectRef:
        _check_key(key)
        try:
            resp = self._client.put(self._url(bucket, key), content=data)
        except httpx.TransportError as exc:
            raise StorageUnavailable(str(exc)) from exc
        if resp.status_code != 200:
            raise StorageUnavailable(f"PUT {bucket}/{key} -> {resp.status_code}")
        etag = resp.headers.get("ETag", "").strip('"') or _etag(data)
        return ObjectRef(bucket, key, etag, len(data))

    def get_object(self, bucket: str, key: str) -> bytes:
        _check_key(key)
        try:
            resp = self._client.get(self._url(bucket, key))
        except httpx.TransportError as exc:
            raise StorageUnavailable(str(exc)) from exc
        if resp.status_code == 404:
            raise NotFound(f"{bucket}/{key}")
        if resp.status_code != 200:
            raise StorageUnavailable(f"GET {bucket}/{key} -> {resp.status_code}")
        return resp.content

    def delete_object(self, bucket: str, key: str) -> None:
        _check_key(key)
        try:
            resp = self._client.delete(self._url(bucket, key))
        except httpx.TransportError as exc:
            raise StorageUnavailable(str(exc)) from exc
        if resp.status_code == 404:
            raise NotFound(f"{bucket}/{key}")
        if resp.status_code not in (200, 204):
            raise StorageUnavailable(f"DELETE {bucket}/{key} -> {resp.status_code}")

    def list_objects(self, bucket: str, prefix: str = "") -> list[ObjectRef]:
        try:
            resp = self._client.get(
                self._url(bucket), params={"list-type": "2", "prefix": prefix}
            )
        except httpx.TransportError as exc:
            raise StorageUnavailable(str(exc)) from exc
        if resp.status_code == 404:
            return []
        if resp.status_code != 200:
            raise StorageUnavailable(f"LIST {bucket} -> {resp.status_code}")
        root = ElementTree.fromstring(resp.content)
        ns = ""
        if root.tag.startswith("{"):
            ns = root.tag[: root.tag.index("}") + 1]
        refs = []
        for node in root.findall(f"{ns}Contents"):
            key = node.findtext(f"{ns}Key") or ""
            etag = (node.findtext(f"{ns}ETag") or "").strip('"')
            size = int(node.findtext(f"{ns}Size") or 0)
            refs.append(ObjectRef(bucket, key, etag, size))
        refs.sort(key=lambda r: r.key)
        return refs


def blob_store_from_env(env: dict[str, str] | None = None) -> BlobStore:
    """Build the configured backend: STORAGE_BACKEND={fs|s3}."""
    env = dict(os.environ if env is None else env)
    backend = env.get("STORAGE_BACKEND", "fs")
    if backend == "fs":
        return FSBlobStore(env.get("STORAGE_ROOT", "./data/blobs"))
    if backend == "s3":
        return S3BlobStore(
            endpoint=env["S3_ENDPOINT"],
            access_key=env.get("S3_ACCESS_KEY", ""),
            secret_key=env.get("S3_SECRET_KEY", ""),
        )
    raise StorageUnavailable(f"unknown STORAGE_BACKEND: {backend!r}")
