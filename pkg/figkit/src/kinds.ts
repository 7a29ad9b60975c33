/** Series extraction: one chart spec per figure kind. */

import { EmptySelectionError, num, requireColumns, Row } from "./csv.js";
import { ChartSpec, Series } from "./svg.js";

export type Kind = "tradeoff" | "beampattern" | "convergence" | "mc";

function groupOrder(rows: Row[], key: (r: Row) => string): string[] {
  const seen: string[] = [];
  for (const row of rows) {
    const k = key(row);
    if (!seen.includes(k)) seen.push(k);
  }
  return seen;
}

function feasible(rows: Row[]): Row[] {
  return rows.filter((r) => !("feasible" in r) || r.feasible === "true" || r.feasible === "");
}

function tradeoff(rows: Row[]): ChartSpec {
  requireColumns(rows, ["gamma_db", "radar_sinr_db", "mode", "point", "timeshare_radar_sinr_db"]);
  const sweep = feasible(rows).filter((r) => r.point === "sweep");
  if (sweep.length === 0) {
    throw new EmptySelectionError("no feasible sweep rows");
  }
  const series: Series[] = [];
  for (const mode of groupOrder(sweep, (r) => r.mode)) {
    const pts = sweep
      .filter((r) => r.mode === mode)
      .map((r): [number, number] => [num(r, "gamma_db"), num(r, "radar_sinr_db")]);
    series.push({ label: `optimized (${mode})`, points: pts, markers: true });
  }
  const chord = sweep
    .map((r): [number, number] => [num(r, "gamma_db"), num(r, "timeshare_radar_sinr_db")])
    .filter((p) => Number.isFinite(p[1]));
  if (chord.length > 0) {
    series.push({ label: "time sharing", points: chord, dashed: true });
  }
  const bench = feasible(rows).filter((r) => r.point.endsWith("benchmark"));
  for (const row of bench) {
    series.push({
      label: row.point,
      points: [[num(row, "gamma_db"), num(row, "radar_sinr_db")]],
      markers: true,
    });
  }
  return {
    title: "Radar SINR against the user SINR constraint",
    xLabel: "user SINR constraint (dB)",
    yLabel: "radar SINR (dB)",
    series,
  };
}

function beampattern(rows: Row[], marks: number[]): ChartSpec {
  requireColumns(rows, ["angle_deg", "joint_pattern_db", "n_tx", "gamma_db"]);
  const series: Series[] = [];
  const keys = groupOrder(rows, (r) => `${r.n_tx}|${r.gamma_db}|${r.mode ?? ""}`);
  for (const key of keys) {
    const [n, gamma] = key.split("|");
    const pts = rows
      .filter((r) => `${r.n_tx}|${r.gamma_db}|${r.mode ?? ""}` === key)
      .map((r): [number, number] => [num(r, "angle_deg"), num(r, "joint_pattern_db")]);
    series.push({ label: `N=${n}, target ${gamma} dB`, points: pts });
  }
  return {
    title: "Joint transmit-receive pattern (0 dB peak)",
    xLabel: "angle (deg)",
    yLabel: "normalized response (dB)",
    series,
    xMarks: marks,
  };
}

function convergence(rows: Row[]): ChartSpec {
  requireColumns(rows, ["iteration", "radar_sinr_db", "algorithm", "k"]);
  const usable = feasible(rows).filter((r) => r.iteration !== "");
  if (usable.length === 0) {
    throw new EmptySelectionError("no feasible traces");
  }
  const series: Series[] = [];
  for (const key of groupOrder(usable, (r) => `${r.algorithm}|${r.k}`)) {
    const [algorithm, k] = key.split("|");
    const pts = usable
      .filter((r) => `${r.algorithm}|${r.k}` === key)
      .map((r): [number, number] => [num(r, "iteration"), num(r, "radar_sinr_db")]);
    series.push({ label: `${algorithm}, K=${k}`, points: pts, markers: true });
  }
  return {
    title: "Radar SINR per outer iteration",
    xLabel: "iteration",
    yLabel: "radar SINR (dB)",
    series,
  };
}

function mc(rows: Row[]): ChartSpec {
  requireColumns(rows, ["gamma_db", "k", "mode", "mean_radar_sinr_db"]);
  const usable = rows.filter((r) => r.mode !== "gain" && r.mean_radar_sinr_db !== "");
  if (usable.length === 0) {
    throw new EmptySelectionError("no averaged rows");
  }
  const gammas = new Set(usable.map((r) => r.gamma_db));
  const byGamma = gammas.size > 1;
  const series: Series[] = [];
  const keyOf = byGamma
    ? (r: Row) => `K=${r.k}, ${r.mode}` + (r.n_tx ? `, N=${r.n_tx}` : "")
    : (r: Row) => `${r.mode}` + (r.n_tx ? `, N=${r.n_tx}` : "");
  for (const key of groupOrder(usable, keyOf)) {
    const pts = usable
      .filter((r) => keyOf(r) === key)
      .map((r): [number, number] => [
        byGamma ? num(r, "gamma_db") : num(r, "k"),
        num(r, "mean_radar_sinr_db"),
      ]);
    series.push({ label: key, points: pts, markers: true });
  }
  return {
    title: "Average radar SINR over fading draws",
    xLabel: byGamma ? "user SINR constraint (dB)" : "number of users",
    yLabel: "average radar SINR (dB)",
    series,
  };
}

export function buildChart(kind: Kind, rows: Row[], marks: number[]): ChartSpec {
  switch (kind) {
    case "tradeoff":
      return tradeoff(rows);
    case "beampattern":
      return beampattern(rows, marks);
    case "convergence":
      return convergence(rows);
    case "mc":
      return mc(rows);
  }
}
