"""Pure read-authorization predicate shared by retrieval and the gateway."""

from __future__ import annotations

from ragstack.core import AccessPolicy, Principal


def authorize_read(principal: Principal, acl: AccessPolicy) -> bool:
    """True iff the policy grants the principal read access.

    public wins, then direct user grant, then any group overlap. An empty
    policy denies everyone (fail-closed).
    """
    return (
        acl.public
        or principal.user_id in acl.allowed_users
        or not principal.groups.isdisjoint(acl.allowed_groups)
    )
