"""Administrative CLI mirroring the REST surface.

Exit codes: 0 success, 1 API error, 2 usage error. --json emits the raw
response body for scripting.
"""

from __future__ import annotations

import base64
import json
import os
import sys

import click
import httpx


def _client(ctx) -> httpx.Client:
    return ctx.obj["client"]


def _fail(code: str, message: str, as_json: bool) -> None:
    if as_json:
        click.echo(json.dumps({"code": code, "message": message}))
    else:
        click.echo(f"error [{code}]: {message}", err=True)
    sys.exit(1)


def _request(ctx, method: str, path: str, as_json: bool, **kwargs) -> dict:
    token = ctx.obj["token"]
    headers = {"Authorization": f"Bearer {token}"} if token else {}
    try:
        resp = _client(ctx).request(method, ctx.obj["endpoint"] + path,
                                    headers=headers, **kwargs)
    except httpx.TransportError as exc:
        _fail("endpoint_unreachable", str(exc), as_json)
    if resp.status_code >= 400:
        try:
            body = resp.json()
        except ValueError:
            body = {"code": "internal_error", "message": resp.text}
        _fail(body.get("code", "internal_error"), body.get("message", ""), as_json)
    return resp.json()


@click.group()
@click.option("--endpoint", "-e", default=None, help="gateway base URL")
@click.option("--token", "-t", default=None, help="bearer session token")
@click.pass_context
def cli(ctx, endpoint, token):
    """rag: command-line client for the RAG gateway."""
    ctx.ensure_object(dict)
    ctx.obj.setdefault("endpoint",
                       (endpoint or os.environ.get("RAG_ENDPOINT",
                                                   "http://127.0.0.1:8080")).rstrip("/"))
    ctx.obj.setdefault("token", token or os.environ.get("RAG_TOKEN", ""))
    ctx.obj.setdefault("client", httpx.Client(timeout=30.0))


@cli.command()
@click.argument("source")
@click.option("--group", "-g", default="", help="comma-separated allowed groups")
@click.option("--user", "-u", default="", help="comma-separated allowed users")
@click.option("--public", is_flag=True, default=False)
@click.option("--format", "fmt", type=click.Choice(["auto", "plain_text", "md"]),
              default="auto")
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def ingest(ctx, source, group, user, public, fmt, as_json):
    """Ingest a local file or URI into the knowledge base."""
    try:
        with open(source, "rb") as fh:
            content = fh.read()
    except OSError as exc:
        _fail("source_unreachable", f"{source}: {exc}", as_json)
    body = {
        "source_uri": source,
        "declared_format": "markdown" if fmt == "md" else fmt,
        "acl": {
            "allowed_groups": [g for g in group.split(",") if g],
            "allowed_users": [u for u in user.split(",") if u],
            "public": public,
        },
        "content_base64": base64.b64encode(content).decode(),
    }
    report = _request(ctx, "POST", "/v1/documents", as_json, json=body)
    if as_json:
        click.echo(json.dumps(report))
    else:
        status = "skipped (unchanged)" if report["skipped"] else "ingested"
        click.echo(f"{status}: doc_id={report['doc_id']} version={report['version']} "
                   f"chunks={report['chunk_count']}")


@cli.command()
@click.argument("text")
@click.option("--show-chunks", is_flag=True, default=False)
@click.option("--json", "as_json", is_flag=True, default=False)
@click.option("--k", type=int, default=None)
@click.pass_context
def query(ctx, text, show_chunks, as_json, k):
    """Ask a question against the knowledge base."""
    body = {"query": text}
    if k:
        body["k"] = k
    answer = _request(ctx, "POST", "/v1/query", as_json, json=body)
    if as_json:
        click.echo(json.dumps(answer))
        return
    click.echo(answer["text"])
    if answer.get("refusal"):
        click.echo(f"(refused: {answer.get('refusal_reason')})")
    for c in answer["citations"]:
        click.echo(f"  [{c['chunk_id'][:12]}] doc={c['doc_id']} "
                   f"score={c['relevance_score']:.3f}")
    if show_chunks:
        for c in answer["citations"]:
            doc = _request(ctx, "GET", f"/v1/documents/{c['doc_id']}/chunks", as_json)
            for chunk in doc["chunks"]:
                if chunk["chunk_id"] == c["chunk_id"]:
                    click.echo("---")
                    click.echo(chunk["text"])


@cli.group()
def user():
    """Manage users (admin session required)."""


@user.command("add")
@click.argument("user_id")
@click.option("--secret", prompt=True, hide_input=True)
@click.option("--group", "-g", default="", help="comma-separated groups")
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def user_add(ctx, user_id, secret, group, as_json):
    out = _request(ctx, "POST", "/v1/admin/users", as_json, json={
        "user_id": user_id, "secret": secret,
        "groups": [g for g in group.split(",") if g],
    })
    click.echo(json.dumps(out) if as_json else f"added {out['user_id']}")


@user.command("disable")
@click.argument("user_id")
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def user_disable(ctx, user_id, as_json):
    out = _request(ctx, "POST", f"/v1/admin/users/{user_id}/disable", as_json)
    click.echo(json.dumps(out) if as_json else f"disabled {out['user_id']}")


@user.command("groups")
@click.argument("user_id")
@click.argument("groups")
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def user_groups(ctx, user_id, groups, as_json):
    out = _request(ctx, "PUT", f"/v1/admin/users/{user_id}/groups", as_json,
                   json={"groups": [g for g in groups.split(",") if g]})
    click.echo(json.dumps(out) if as_json
               else f"{out['user_id']}: {','.join(out['groups'])}")


@cli.command()
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def health(ctx, as_json):
    """Report liveness and readiness of the stack."""
    live = _request(ctx, "GET", "/healthz", as_json)
    client = _client(ctx)
    ready_resp = client.get(ctx.obj["endpoint"] + "/readyz")
    ready = ready_resp.status_code == 200
    out = {"gateway": live["status"], "ready": ready}
    if not ready:
        try:
            out["detail"] = ready_resp.json().get("message", "")
        except ValueError:
            pass
    if as_json:
        click.echo(json.dumps(out))
    else:
        click.echo(f"gateway: {out['gateway']}")
        click.echo(f"dependencies: {'ready' if ready else 'unavailable'}")
    if not ready:
        sys.exit(1)


@cli.command()
@click.argument("user_id")
@click.option("--secret", prompt=True, hide_input=True)
@click.option("--json", "as_json", is_flag=True, default=False)
@click.pass_context
def login(ctx, user_id, secret, as_json):
    """Obtain a session token."""
    out = _request(ctx, "POST", "/v1/auth/login", as_json,
                   json={"user_id": user_id, "secret": secret})
    click.echo(json.dumps(out) if as_json else out["token"])


@cli.command()
@click.option("--host", default="127.0.0.1")
@click.option("--port", type=int, default=8080)
@click.option("--bootstrap-admin", default="",
              help="user:secret to seed an admin account")
def serve(host, port, bootstrap_admin):
    """Run the gateway (expects model endpoints via environment)."""
    import uvicorn

    from ragstack.api import create_stack

    stack = create_stack()
    if bootstrap_admin:
        uid, _, secret = bootstrap_admin.partition(":")
        stack.auth.add_user(uid, secret, {"admin"})
    uvicorn.run(stack.app, host=host, port=port)


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()
