/** Minimal CSV reader for the result tables: header row, comma-separated,
 * no quoting (the producer never emits commas inside fields). */

export class MissingColumnError extends Error {
  constructor(column: string) {
    super(`missing column: ${column}`);
    this.name = "MissingColumnError";
  }
}

export class EmptySelectionError extends Error {
  constructor(detail: string) {
    super(`empty selection: ${detail}`);
    this.name = "EmptySelectionError";
  }
}

export type Row = Record<string, string>;

export function parseCsv(text: string): Row[] {
  const lines = text.split(/\r?\n/).filter((line) => line.length > 0);
  if (lines.length === 0) {
    throw new EmptySelectionError("input has no rows");
  }
  const header = lines[0].split(",");
  return lines.slice(1).map((line) => {
    const cells = line.split(",");
    const row: Row = {};
    header.forEach((name, i) => {
      row[name] = cells[i] ?? "";
    });
    return row;
  });
}

export function requireColumns(rows: Row[], columns: string[]): void {
  if (rows.length === 0) {
    throw new EmptySelectionError("no data rows");
  }
  for (const column of columns) {
    if (!(column in rows[0])) {
      throw new MissingColumnError(column);
    }
  }
}

export function num(row: Row, column: string): number {
  const value = Number(row[column]);
  return Number.isFinite(value) ? value : NaN;
}
