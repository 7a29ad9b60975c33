/** Deterministic SVG line charts: fixed canvas, fixed styles, no timestamps,
 * numbers formatted with a fixed precision so reruns are byte-identical. */

export interface Series {
  label: string;
  points: Array<[number, number]>;
  dashed?: boolean;
  markers?: boolean;
}

export interface ChartSpec {
  title: string;
  xLabel: string;
  yLabel: string;
  series: Series[];
  /** vertical reference lines (e.g. interferer angles) */
  xMarks?: number[];
}

const WIDTH = 760;
const HEIGHT = 480;
const MARGIN = { left: 64, right: 180, top: 40, bottom: 48 };
const PALETTE = ["#1f567d", "#c44e52", "#55a868", "#8172b2", "#ccb974", "#64b5cd", "#937860", "#da8bc3"];

const fmt = (v: number): string => v.toFixed(2);

function bounds(values: number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (Number.isFinite(v)) {
      lo = Math.min(lo, v);
      hi = Math.max(hi, v);
    }
  }
  if (!Number.isFinite(lo)) {
    lo = 0;
    hi = 1;
  }
  if (hi - lo < 1e-9) {
    lo -= 1;
    hi += 1;
  }
  return [lo, hi];
}

function ticks(lo: number, hi: number, count: number): number[] {
  const rawStep = (hi - lo) / count;
  const mag = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const step = [1, 2, 5, 10].map((m) => m * mag).find((s) => (hi - lo) / s <= count) ?? rawStep;
  const start = Math.ceil(lo / step) * step;
  const out: number[] = [];
  for (let v = start; v <= hi + 1e-9; v += step) {
    out.push(Math.round(v / step) * step);
  }
  return out;
}

export function renderChart(spec: ChartSpec): string {
  const xs = spec.series.flatMap((s) => s.points.map((p) => p[0]));
  const ys = spec.series.flatMap((s) => s.points.map((p) => p[1]));
  const [x0, x1] = bounds(xs.concat(spec.xMarks ?? []));
  const [y0, y1] = bounds(ys);
  const plotW = WIDTH - MARGIN.left - MARGIN.right;
  const plotH = HEIGHT - MARGIN.top - MARGIN.bottom;
  const sx = (x: number) => MARGIN.left + ((x - x0) / (x1 - x0)) * plotW;
  const sy = (y: number) => MARGIN.top + (1 - (y - y0) / (y1 - y0)) * plotH;

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${WIDTH}" height="${HEIGHT}" ` +
      `viewBox="0 0 ${WIDTH} ${HEIGHT}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${WIDTH}" height="${HEIGHT}" fill="#ffffff"/>`);
  parts.push(
    `<text x="${WIDTH / 2}" y="22" text-anchor="middle" font-size="15">${spec.title}</text>`,
  );

  for (const t of ticks(x0, x1, 8)) {
    const x = sx(t);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${fmt(x)}" y="${HEIGHT - MARGIN.bottom + 18}" text-anchor="middle" font-size="11">${+t.toFixed(6)}</text>`,
    );
  }
  for (const t of ticks(y0, y1, 7)) {
    const y = sy(t);
    parts.push(
      `<line x1="${MARGIN.left}" y1="${fmt(y)}" x2="${WIDTH - MARGIN.right}" y2="${fmt(y)}" stroke="#dddddd" stroke-width="1"/>`,
      `<text x="${MARGIN.left - 8}" y="${fmt(y + 4)}" text-anchor="end" font-size="11">${+t.toFixed(6)}</text>`,
    );
  }
  for (const mark of spec.xMarks ?? []) {
    const x = sx(mark);
    parts.push(
      `<line x1="${fmt(x)}" y1="${MARGIN.top}" x2="${fmt(x)}" y2="${HEIGHT - MARGIN.bottom}" stroke="#999999" stroke-width="1" stroke-dasharray="2,4"/>`,
    );
  }
  parts.push(
    `<rect x="${MARGIN.left}" y="${MARGIN.top}" width="${plotW}" height="${plotH}" fill="none" stroke="#333333"/>`,
    `<text x="${MARGIN.left + plotW / 2}" y="${HEIGHT - 10}" text-anchor="middle" font-size="12">${spec.xLabel}</text>`,
    `<text x="18" y="${MARGIN.top + plotH / 2}" text-anchor="middle" font-size="12" transform="rotate(-90 18 ${MARGIN.top + plotH / 2})">${spec.yLabel}</text>`,
  );

  spec.series.forEach((series, i) => {
    const color = PALETTE[i % PALETTE.length];
    const visible = series.points.filter((p) => Number.isFinite(p[0]) && Number.isFinite(p[1]));
    const path = visible.map((p) => `${fmt(sx(p[0]))},${fmt(sy(p[1]))}`).join(" ");
    const dash = series.dashed ? ` stroke-dasharray="6,4"` : "";
    if (visible.length > 1) {
      parts.push(
        `<polyline points="${path}" fill="none" stroke="${color}" stroke-width="1.8"${dash}/>`,
      );
    }
    if (series.markers || visible.length === 1) {
      for (const p of visible) {
        parts.push(`<circle cx="${fmt(sx(p[0]))}" cy="${fmt(sy(p[1]))}" r="3" fill="${color}"/>`);
      }
    }
    const ly = MARGIN.top + 16 + i * 18;
    const lx = WIDTH - MARGIN.right + 12;
    parts.push(
      `<line x1="${lx}" y1="${ly - 4}" x2="${lx + 22}" y2="${ly - 4}" stroke="${color}" stroke-width="1.8"${dash}/>`,
      `<text x="${lx + 28}" y="${ly}" font-size="11">${series.label}</text>`,
    );
  });

  parts.push("</svg>");
  return parts.join("\n") + "\n";
}
