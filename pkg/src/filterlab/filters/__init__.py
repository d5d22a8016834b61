"""Concrete filters on N, the filter algebra, and property checks."""

from .chains import BaseChain, chain_from_json, constant_chain, fd_drop_chain, fd_tails_chain, tails_chain
from .handles import (
    DEFAULT_HORIZON,
    ColumnFD,
    ColumnFd,
    CountableBase,
    Filter,
    Frechet,
    Product,
    Statistical,
    Sum,
    Trace,
    contains,
    filter_from_json,
    is_stationary,
    product,
    rectangle_sides,
    sum_filter,
    trace,
)
from .properties import (
    Split,
    StandardEmbedding,
    block_respecting_check,
    blocking_for,
    diagonal_check,
    is_subset,
    split_stationary,
    standard_embedding,
    strongly_diagonal_witness,
)
