/** One exception class per engine error category, carrying the original
 * message. Unknown categories fall back to EngineError. */

export class EngineError extends Error {
  constructor(
    readonly category: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
    this.name = new.target.name;
  }
}

export class InvalidKeyError extends EngineError {}
export class ValueKindError extends EngineError {}
export class SpecSyntaxError extends EngineError {}
export class TableNameError extends EngineError {}
export class TableExistsError extends EngineError {}
export class UnknownTableError extends EngineError {}
export class CombinerMismatchError extends EngineError {}
export class CombinerValueError extends EngineError {}
export class TsvFormatError extends EngineError {}
export class SnapshotIOError extends EngineError {}
export class MemoryCapError extends EngineError {}
export class RowTooLargeError extends MemoryCapError {}
export class AdjacencyError extends EngineError {}
export class UsageError extends EngineError {}

const BY_CATEGORY: Record<string, new (c: string, m: string, s: number) => EngineError> = {
  "invalid-key": InvalidKeyError,
  "value-kind": ValueKindError,
  "spec-syntax": SpecSyntaxError,
  "table-name": TableNameError,
  "table-exists": TableExistsError,
  "unknown-table": UnknownTableError,
  "combiner-mismatch": CombinerMismatchError,
  "combiner-value": CombinerValueError,
  "tsv-format": TsvFormatError,
  io: SnapshotIOError,
  "memory-cap": MemoryCapError,
  "row-too-large": RowTooLargeError,
  adjacency: AdjacencyError,
  usage: UsageError,
};

export function errorFromPayload(
  status: number,
  payload: { category?: string; message?: string } | undefined,
  fallback: string,
): EngineError {
  const category = payload?.category ?? "engine";
  const message = payload?.message ?? fallback;
  const cls = BY_CATEGORY[category] ?? EngineError;
  return new cls(category, message, status);
}
