from ragstack.auth.policy import authorize_read
from ragstack.auth.service import AuthService, SessionToken

__all__ = ["AuthService", "SessionToken", "authorize_read"]
