"""Authentication: local user store, opaque session tokens, group directory.

A deliberately substitutable dummy for an enterprise IdP: everything behind
``authenticate`` / ``resolve_principal`` can be swapped without touching
retrieval. Secrets are stored as salted iterated PBKDF2 digests only;
authentication failure is a single error regardless of cause.
"""

from __future__ import annotations

import hashlib
import hmac
import secrets
import threading
from dataclasses import dataclass
from datetime import datetime, timedelta

from ragstack.core import Principal, utcnow
from ragstack.errors import AccountDisabled, InvalidCredentials, Unauthorized

DEFAULT_SESSION_LIFETIME = timedelta(hours=8)
_PBKDF2_ITERATIONS = 100_000
_SALT_BYTES = 16


@dataclass(frozen=True)
class SessionToken:
    token: str  # 256-bit random, URL-safe
    user_id: str
    issued_at: datetime
    expires_at: datetime


@dataclass(frozen=True)
class _UserRecord:
    user_id: str
    salt: bytes
    secret_hash: bytes
    disabled: bool = False


class AuthService:
    def __init__(self, session_lifetime: timedelta = DEFAULT_SESSION_LIFETIME,
                 iterations: int = _PBKDF2_ITERATIONS,
                 clock=utcnow):
        self._users: dict[str, _UserRecord] = {}
        self._groups: dict[str, frozenset[str]] = {}
        self._sessions: dict[str, SessionToken] = {}
        self._lock = threading.Lock()
        self._lifetime = session_lifetime
        self._iterations = iterations
        self._clock = clock

    # -- user management ----------------------------------------------------

    def _hash(self, secret: str, salt: bytes) -> bytes:
        return hashlib.pbkdf2_hmac("sha256", secret.encode("utf-8"), salt,
                                   self._iterations)

    def add_user(self, user_id: str, secret: str,
                 groups: set[str] | frozenset[str] = frozenset()) -> None:
        salt = secrets.token_bytes(_SALT_BYTES)
        record = _UserRecord(user_id, salt, self._hash(secret, salt))
        with self._lock:
            self._users[user_id] = record
            self.set_groups(user_id, groups)

    def disable_user(self, user_id: str) -> None:
        with self._lock:
            rec = self._users.get(user_id)
            if rec is None:
                raise Unauthorized("no such user")
            self._users[user_id] = _UserRecord(rec.user_id, rec.salt,
                                               rec.secret_hash, disabled=True)
            self._sessions = {t: s for t, s in self._sessions.items()
                              if s.user_id != user_id}

    def set_groups(self, user_id: str, groups: set[str] | frozenset[str]) -> None:
        # atomic snapshot swap so concurrent lookups see a consistent mapping
        updated = dict(self._groups)
        updated[user_id] = frozenset(groups)
        self._groups = updated

    def groups_of(self, user_id: str) -> frozenset[str]:
        return self._groups.get(user_id, frozenset())

    # -- sessions -----------------------------------------------------------

    def authenticate(self, user_id: str, secret: str) -> SessionToken:
        record = self._users.get(user_id)
        # constant-time comparison against a dummy hash when the user is
        # unknown, so both failure causes take the same code path
        salt = record.salt if record else b"\x00" * _SALT_BYTES
        expected = record.secret_hash if record else self._hash("", salt)
        ok = hmac.compare_digest(self._hash(secret, salt), expected)
        if record is None or not ok:
            raise InvalidCredentials("invalid user id or secret")
        if record.disabled:
            raise AccountDisabled(user_id)
        now = self._clock()
        token = SessionToken(
            token=secrets.token_urlsafe(32),
            user_id=user_id,
            issued_at=now,
            expires_at=now + self._lifetime,
        )
        with self._lock:
            self._sessions[token.token] = token
        return token

    def logout(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)

    def resolve_principal(self, token: str) -> Principal:
        session = self._sessions.get(token)
        if session is None or session.expires_at <= self._clock():
            raise Unauthorized("invalid or expired session token")
        return Principal(
            user_id=session.user_id,
            groups=self.groups_of(session.user_id),
            session_expiry=session.expires_at,
        )
