/** Wire types shared with the engine's HTTP service. */

export type Value = number | string;
export type Kind = "num" | "str";

/** An array as parallel triple lists in row-major sorted order. */
export interface ArrayData {
  kind: Kind;
  rows: string[];
  cols: string[];
  values: Value[];
}

export type Triple = [row: string, col: string, value: Value];

export interface GraphArg {
  /** In-memory adjacency, or ... */
  adjacency?: ArrayData;
  /** ... the base name of a bound table group held by the service. */
  table?: string;
}

export interface BfsOptions {
  minDegree?: number;
  maxDegree?: number;
}

export interface TableInfo {
  name: string;
  combiner: string;
  entries: number;
  scans: number;
}

export interface TableMultStats {
  partial_products: number;
  entries_emitted: number;
  peak_bytes: number;
  max_row_pair_bytes: number;
}

export interface HealthInfo {
  status: string;
  version: string;
  store_dir: string | null;
  tables: string[];
}
