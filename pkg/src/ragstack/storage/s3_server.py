"""Minimal S3-compatible server over an FSBlobStore.

Implements the path-style subset the blob client speaks (PUT/GET/DELETE
object, ListObjectsV2) so the substitution path can be exercised without any
external dependency. Run standalone via `python -m ragstack.storage.s3_server`.
"""

from __future__ import annotations

from xml.sax.saxutils import escape

from fastapi import FastAPI, Request, Response

from ragstack.errors import NotFound
from ragstack.storage.blob import FSBlobStore


def create_s3_app(store: FSBlobStore) -> FastAPI:
    # no docs/openapi routes: they would shadow buckets named "docs" etc.
    app = FastAPI(title="s3-dummy", docs_url=None, redoc_url=None, openapi_url=None)

    @app.put("/{bucket}/{key:path}")
    async def put_object(bucket: str, key: str, request: Request) -> Response:
        data = await request.body()
        ref = store.put_object(bucket, key, data)
        return Response(status_code=200, headers={"ETag": f'"{ref.etag}"'})

    @app.get("/{bucket}/{key:path}")
    async def get_object(bucket: str, key: str) -> Response:
        try:
            data = store.get_object(bucket, key)
        except NotFound:
            return Response(status_code=404, content=_error_xml("NoSuchKey"))
        return Response(status_code=200, content=data,
                        media_type="application/octet-stream")

    @app.delete("/{bucket}/{key:path}")
    async def delete_object(bucket: str, key: str) -> Response:
        try:
            store.delete_object(bucket, key)
        except NotFound:
            return Response(status_code=404, content=_error_xml("NoSuchKey"))
        return Response(status_code=204)

    @app.get("/{bucket}")
    async def list_bucket(bucket: str, prefix: str = "") -> Response:
        refs = store.list_objects(bucket, prefix)
        items = "".join(
            f"<Contents><Key>{escape(r.key)}</Key><ETag>&quot;{r.etag}&quot;</ETag>"
            f"<Size>{r.size_bytes}</Size></Contents>"
            for r in refs
        )
        body = (
            '<?xml version="1.0" encoding="UTF-8"?>'
            f"<ListBucketResult><Name>{escape(bucket)}</Name>"
            f"<Prefix>{escape(prefix)}</Prefix>{items}</ListBucketResult>"
        )
        return Response(status_code=200, content=body, media_type="application/xml")

    return app


def _error_xml(code: str) -> str:
    return f'<?xml version="1.0"?><Error><Code>{code}</Code></Error>'


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="S3-compatible dummy server")
    parser.add_argument("--root", default="./data/s3")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=9000)
    args = parser.parse_args()
    uvicorn.run(create_s3_app(FSBlobStore(args.root)), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
