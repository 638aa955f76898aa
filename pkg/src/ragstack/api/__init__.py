from ragstack.api.app import Stack, create_stack
from ragstack.api.gateway import ERROR_CODES, create_gateway

__all__ = ["ERROR_CODES", "Stack", "create_gateway", "create_stack"]
