"""Shared functions for state management."""

try:
    from typing_extensions import Literal, Optional, TypeVar, Union
except ImportError:
    from typing import Literal, Optional, TypeVar, Union

R = TypeVar("R")


def reduce_records(
        existing: Optional[list[R]],
        new: Union[list[R], R, Literal["delete"]],
) -> list[R]:
    """Append records produced by a node to the ones already in the state.

    Generation records and sweep rows accumulate this way. Parallel branches
    may deliver their records in any order; consumers that need a stable order
    sort by their own key.

    Args:
        existing (Optional[list]): The records in the state, if any.
        new (Union[list, record, Literal["delete"]]): Records to append, a
            single record, or the literal "delete" to clear the list.
    """
    if isinstance(new, str) and new == "delete":
        return []
    existing_list = list(existing) if existing else []
    if isinstance(new, list):
        return existing_list + new
    return existing_list + [new]
