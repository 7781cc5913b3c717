"""HTTP service wrapping the engine.

One process holds one store (optionally loaded from a snapshot directory);
array operations are stateless and table operations act on the held store.
Arrays travel as parallel (rows, cols, values) lists in row-major sorted
order, exactly what ``to_triples`` yields, so clients can compare results
byte for byte with the CLI's TSV output.
"""

from __future__ import annotations

import os
import threading
from typing import Literal, Optional, Union

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from . import __version__
from .assoc import ALL, AssocArray, ew_add, ew_mult, from_triples
from .errors import EngineError, TableExistsError, UnknownTableError, UsageError
from .graphs import bfs, jaccard, ktruss
from .kernels import matmul, semiring
from .kvstore import Store
from .schema import (
    DEGREE_SUFFIX,
    TRANSPOSE_SUFFIX,
    TableRef,
    bind,
    degree,
    ingest_assoc,
    query,
    tablemult,
)

ValueJson = Union[float, str]


class ArrayJson(BaseModel):
    """Wire form of an array: parallel triple lists, row-major sorted."""

    kind: Literal["num", "str"] = "num"
    rows: list[str] = Field(default_factory=list)
    cols: list[str] = Field(default_factory=list)
    values: list[ValueJson] = Field(default_factory=list)

    def to_assoc(self) -> AssocArray:
        return from_triples(self.rows, self.cols, self.values, collision="last")

    @classmethod
    def from_assoc(cls, a: AssocArray) -> "ArrayJson":
        rows, cols, values = [], [], []
        for r, c, v in a.to_triples():
            rows.append(r)
            cols.append(c)
            values.append(v)
        return cls(kind=a.kind, rows=rows, cols=cols, values=values)


class FromTriplesRequest(BaseModel):
    rows: list[str]
    cols: list[str]
    values: list[ValueJson]
    collision: Optional[str] = None


class UnaryRequest(BaseModel):
    array: ArrayJson


class SubrefRequest(BaseModel):
    array: ArrayJson
    row_spec: str = ":"
    col_spec: str = ":"


class BinaryRequest(BaseModel):
    a: ArrayJson
    b: ArrayJson
    op: Optional[str] = None


class MatmulRequest(BaseModel):
    a: ArrayJson
    b: ArrayJson
    semiring: str = "plus.times"


class GraphRequest(BaseModel):
    adjacency: Optional[ArrayJson] = None
    table: Optional[str] = None


class BfsRequest(GraphRequest):
    seeds: str
    hops: int
    min_degree: Optional[int] = None
    max_degree: Optional[int] = None


class KtrussRequest(GraphRequest):
    k: int


class IngestRequest(BaseModel):
    array: ArrayJson


class QueryRequest(BaseModel):
    row_spec: str = ":"
    col_spec: str = ":"


class TableMultRequest(BaseModel):
    table_a: str
    table_b: str
    table_c: str
    semiring: str = "plus.times"
    memory_cap: Optional[int] = None


class SnapshotRequest(BaseModel):
    directory: Optional[str] = None


class TableInfo(BaseModel):
    name: str
    combiner: str
    entries: int
    scans: int


class IngestResponse(BaseModel):
    ingested: int


class TableMultResponse(BaseModel):
    partial_products: int
    entries_emitted: int
    peak_bytes: int
    max_row_pair_bytes: int


_STATUS_BY_CATEGORY = {
    UnknownTableError.category: 404,
    TableExistsError.category: 409,
}


def create_app(store_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="d4m", version=__version__)
    app.state.store = Store.load(store_dir) if store_dir else Store()
    app.state.store_dir = store_dir
    app.state.write_lock = threading.RLock()

    @app.exception_handler(EngineError)
    def engine_error(_request: Request, exc: EngineError):
        status = _STATUS_BY_CATEGORY.get(exc.category, 400)
        return JSONResponse(
            status_code=status, content={"category": exc.category, "message": str(exc)}
        )

    def store() -> Store:
        return app.state.store

    def attached(base: str) -> TableRef:
        missing = [
            name
            for name in (base, base + TRANSPOSE_SUFFIX, base + DEGREE_SUFFIX)
            if not store().has_table(name)
        ]
        if missing:
            raise UnknownTableError(f"{base!r} is not a bound table group here")
        return bind(store(), base)

    @app.get("/health")
    def health():
        return {
            "status": "ok",
            "version": __version__,
            "store_dir": app.state.store_dir,
            "tables": store().table_names(),
        }

    @app.get("/tables", response_model=list[TableInfo])
    def list_tables():
        out = []
        for name in store().table_names():
            t = store().table(name)
            out.append(
                TableInfo(
                    name=name,
                    combiner=t.combiner,
                    entries=sum(1 for _ in t.scan()),
                    scans=t.stats["scans"],
                )
            )
        return out

    # -- stateless array operations ---------------------------------------

    @app.post("/assoc/from-triples", response_model=ArrayJson)
    def assoc_from_triples(req: FromTriplesRequest):
        return ArrayJson.from_assoc(from_triples(req.rows, req.cols, req.values, req.collision))

    @app.post("/assoc/subref", response_model=ArrayJson)
    def assoc_subref(req: SubrefRequest):
        return ArrayJson.from_assoc(req.array.to_assoc().subref(req.row_spec, req.col_spec))

    @app.post("/assoc/transpose", response_model=ArrayJson)
    def assoc_transpose(req: UnaryRequest):
        return ArrayJson.from_assoc(req.array.to_assoc().transpose())

    @app.post("/assoc/logical", response_model=ArrayJson)
    def assoc_logical(req: UnaryRequest):
        return ArrayJson.from_assoc(req.array.to_assoc().logical())

    @app.post("/assoc/ew-add", response_model=ArrayJson)
    def assoc_ew_add(req: BinaryRequest):
        return ArrayJson.from_assoc(ew_add(req.a.to_assoc(), req.b.to_assoc(), req.op))

    @app.post("/assoc/ew-mult", response_model=ArrayJson)
    def assoc_ew_mult(req: BinaryRequest):
        return ArrayJson.from_assoc(ew_mult(req.a.to_assoc(), req.b.to_assoc(), req.op))

    @app.post("/assoc/matmul", response_model=ArrayJson)
    def assoc_matmul(req: MatmulRequest):
        sr = semiring(req.semiring)
        return ArrayJson.from_assoc(matmul(req.a.to_assoc(), req.b.to_assoc(), sr))

    # -- graph algorithms ---------------------------------------------------

    def graph_arg(req: GraphRequest):
        if (req.adjacency is None) == (req.table is None):
            raise UsageError("provide exactly one of adjacency or table")
        if req.adjacency is not None:
            return req.adjacency.to_assoc()
        return attached(req.table)

    @app.post("/algo/bfs", response_model=ArrayJson)
    def algo_bfs(req: BfsRequest):
        g = graph_arg(req)
        return ArrayJson.from_assoc(bfs(g, req.seeds, req.hops, req.min_degree, req.max_degree))

    @app.post("/algo/jaccard", response_model=ArrayJson)
    def algo_jaccard(req: GraphRequest):
        return ArrayJson.from_assoc(jaccard(graph_arg(req)))

    @app.post("/algo/ktruss", response_model=ArrayJson)
    def algo_ktruss(req: KtrussRequest):
        with app.state.write_lock:
            return ArrayJson.from_assoc(ktruss(graph_arg(req), req.k))

    # -- store operations -----------------------------------------------------

    @app.post("/tables/{base}/bind")
    def table_bind(base: str):
        with app.state.write_lock:
            ref = bind(store(), base)
        return {
            "base": ref.base,
            "tables": [ref.edge.name, ref.edge_t.name, ref.degree_table.name],
        }

    @app.post("/tables/{base}/ingest", response_model=IngestResponse)
    def table_ingest(base: str, req: IngestRequest):
        with app.state.write_lock:
            ref = bind(store(), base)
            n = ingest_assoc(ref, req.array.to_assoc())
        return IngestResponse(ingested=n)

    @app.post("/tables/{base}/query", response_model=ArrayJson)
    def table_query(base: str, req: QueryRequest):
        return ArrayJson.from_assoc(query(attached(base), req.row_spec, req.col_spec))

    @app.get("/tables/{base}/degree", response_model=ArrayJson)
    def table_degree(base: str, keys: str = ":"):
        return ArrayJson.from_assoc(degree(attached(base), keys))

    @app.post("/tablemult", response_model=TableMultResponse)
    def table_mult(req: TableMultRequest):
        with app.state.write_lock:
            stats = tablemult(
                store(), req.table_a, req.table_b, req.table_c, semiring(req.semiring), req.memory_cap
            )
        return TableMultResponse(
            partial_products=stats.partial_products,
            entries_emitted=stats.entries_emitted,
            peak_bytes=stats.peak_bytes,
            max_row_pair_bytes=stats.max_row_pair_bytes,
        )

    @app.post("/tables/{base}/create")
    def table_create(base: str, combiner: str = "none"):
        with app.state.write_lock:
            store().create_table(base, combiner)
        return {"name": base, "combiner": combiner}

    @app.post("/snapshot/save")
    def snapshot_save(req: SnapshotRequest):
        directory = req.directory or app.state.store_dir
        if not directory:
            raise UsageError("no snapshot directory configured")
        with app.state.write_lock:
            store().save(directory)
        return {"status": "ok", "directory": directory}

    @app.post("/snapshot/load")
    def snapshot_load(req: SnapshotRequest):
        directory = req.directory or app.state.store_dir
        if not directory:
            raise UsageError("no snapshot directory configured")
        with app.state.write_lock:
            app.state.store = Store.load(directory)
        return {"status": "ok", "directory": directory, "tables": store().table_names()}

    return app


app = create_app(os.environ.get("D4M_STORE"))
