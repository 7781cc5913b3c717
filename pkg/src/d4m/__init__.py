"""d4m: associative-array analytics over an embedded sorted key-value store."""

__version__ = "0.1.0"

from .assoc import (
    ALL,
    AssocArray,
    KeyList,
    KeyRange,
    KeySpec,
    ew_add,
    ew_mult,
    from_triples,
    key_list,
    key_range,
    parse_key_spec,
    render_key_spec,
)
from .errors import EngineError
from .graphs import bfs, jaccard, ktruss
from .kernels import MAX_TIMES, MIN_PLUS, PLUS_TIMES, Semiring, matmul, reduce_cols, reduce_rows
from .kvstore import Store, Table
from .schema import (
    TableRef,
    bind,
    decode_exploded,
    degree,
    encode_exploded,
    ingest_assoc,
    query,
    tablemult,
)

__all__ = [
    "ALL",
    "AssocArray",
    "EngineError",
    "KeyList",
    "KeyRange",
    "KeySpec",
    "MAX_TIMES",
    "MIN_PLUS",
    "PLUS_TIMES",
    "Semiring",
    "Store",
    "Table",
    "TableRef",
    "bfs",
    "bind",
    "decode_exploded",
    "degree",
    "encode_exploded",
    "ew_add",
    "ew_mult",
    "from_triples",
    "ingest_assoc",
    "jaccard",
    "key_list",
    "key_range",
    "ktruss",
    "matmul",
    "parse_key_spec",
    "query",
    "reduce_cols",
    "reduce_rows",
    "render_key_spec",
    "tablemult",
    "__version__",
]
