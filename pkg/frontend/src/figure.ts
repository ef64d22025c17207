import { scaleLinear } from "d3-scale";
import { AggregateRow } from "./schema.js";

export const FIGURE_KINDS = ["convergence", "sweep_m", "sweep_power", "deployment"] as const;
export type FigureKind = (typeof FIGURE_KINDS)[number];

const X_LABEL: Record<FigureKind, string> = {
  convergence: "Iteration",
  sweep_m: "Number of reflecting elements",
  sweep_power: "Transmit power (dBm)",
  deployment: "Total reflecting elements",
};

const Y_LABEL = "Weighted sum rate (bps/Hz)";

// stable palette; order also fixes the legend order
const SCHEME_STYLE: Array<[string, string, string]> = [
  ["proposed", "Proposed", "#1f77b4"],
  ["diag_ris", "Diagonal RIS", "#d62728"],
  ["random_bdris", "Random unitary", "#2ca02c"],
  ["no_ris", "No RIS", "#7f7f7f"],
  ["non_coop", "Non-cooperative", "#9467bd"],
  ["centralized", "Centralized", "#1f77b4"],
  ["distributed", "Distributed", "#ff7f0e"],
];

export interface Series {
  scheme: string;
  label: string;
  color: string;
  points: Array<{ x: number; y: number; err: number }>;
}

export function toSeries(rows: AggregateRow[]): Series[] {
  const bySchemes = new Map<string, AggregateRow[]>();
  for (const row of rows) {
    const group = bySchemes.get(row.scheme) ?? [];
    group.push(row);
    bySchemes.set(row.scheme, group);
  }
  const known = SCHEME_STYLE.map(([tag]) => tag);
  const tags = [...bySchemes.keys()].sort((a, b) => {
    const ia = known.indexOf(a);
    const ib = known.indexOf(b);
    if (ia >= 0 && ib >= 0) return ia - ib;
    if (ia >= 0) return -1;
    if (ib >= 0) return 1;
    return a.localeCompare(b);
  });
  return tags.map((tag, i) => {
    const style = SCHEME_STYLE.find(([t]) => t === tag);
    const fallback = `hsl(${(i * 67) % 360}, 60%, 40%)`;
    const points = bySchemes
      .get(tag)!
      .map((r) => ({ x: r.sweepValue, y: r.meanRate, err: r.stderr }))
      .sort((a, b) => a.x - b.x);
    return {
      scheme: tag,
      label: style ? style[1] : tag,
      color: style ? style[2] : fallback,
      points,
    };
  });
}

const fmt = (v: number) => (Math.round(v * 100) / 100).toString();

function esc(text: string): string {
  return text.replace(/&/g, "&amp;").replace(/</g, "&lt;").replace(/>/g, "&gt;");
}

/** Assemble a static SVG figure: one line per scheme, stderr whiskers. */
export function buildSvg(rows: AggregateRow[], kind: FigureKind, width = 760, height = 480): string {
  const series = toSeries(rows);
  const margin = { top: 24, right: 24, bottom: 52, left: 64 };
  const innerW = width - margin.left - margin.right;
  const innerH = height - margin.top - margin.bottom;

  const xs = series.flatMap((s) => s.points.map((p) => p.x));
  const los = series.flatMap((s) => s.points.map((p) => p.y - p.err));
  const his = series.flatMap((s) => s.points.map((p) => p.y + p.err));
  const x = scaleLinear()
    .domain([Math.min(...xs), Math.max(...xs)])
    .range([0, innerW])
    .nice();
  const y = scaleLinear()
    .domain([Math.min(...los, 0), Math.max(...his)])
    .range([innerH, 0])
    .nice();

  const parts: string[] = [];
  parts.push(
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" ` +
      `viewBox="0 0 ${width} ${height}" font-family="Helvetica, Arial, sans-serif">`,
  );
  parts.push(`<rect width="${width}" height="${height}" fill="white"/>`);
  parts.push(`<g transform="translate(${margin.left},${margin.top})">`);

  for (const tick of x.ticks(7)) {
    const px = fmt(x(tick));
    parts.push(`<line x1="${px}" y1="0" x2="${px}" y2="${innerH}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="${px}" y="${innerH + 20}" text-anchor="middle" font-size="12">${fmt(tick)}</text>`,
    );
  }
  for (const tick of y.ticks(7)) {
    const py = fmt(y(tick));
    parts.push(`<line x1="0" y1="${py}" x2="${innerW}" y2="${py}" stroke="#e0e0e0"/>`);
    parts.push(
      `<text x="-8" y="${py}" text-anchor="end" dominant-baseline="middle" font-size="12">${fmt(tick)}</text>`,
    );
  }
  parts.push(`<rect width="${innerW}" height="${innerH}" fill="none" stroke="#333"/>`);

  for (const s of series) {
    const line = s.points.map((p) => `${fmt(x(p.x))},${fmt(y(p.y))}`).join(" ");
    parts.push(
      `<polyline points="${line}" fill="none" stroke="${s.color}" stroke-width="1.8" data-scheme="${s.scheme}"/>`,
    );
    for (const p of s.points) {
      const px = fmt(x(p.x));
      parts.push(`<circle cx="${px}" cy="${fmt(y(p.y))}" r="3" fill="${s.color}"/>`);
      if (p.err > 0) {
        const top = fmt(y(p.y + p.err));
        const bot = fmt(y(p.y - p.err));
        parts.push(`<line x1="${px}" y1="${top}" x2="${px}" y2="${bot}" stroke="${s.color}"/>`);
        for (const cap of [top, bot]) {
          const cx = x(p.x);
          parts.push(
            `<line x1="${fmt(cx - 4)}" y1="${cap}" x2="${fmt(cx + 4)}" y2="${cap}" stroke="${s.color}"/>`,
          );
        }
      }
    }
  }

  series.forEach((s, i) => {
    const ly = 10 + i * 18;
    parts.push(`<line x1="${innerW - 150}" y1="${ly}" x2="${innerW - 122}" y2="${ly}" stroke="${s.color}" stroke-width="1.8"/>`);
    parts.push(`<text x="${innerW - 116}" y="${ly + 4}" font-size="12">${esc(s.label)}</text>`);
  });

  parts.push(
    `<text x="${innerW / 2}" y="${innerH + 42}" text-anchor="middle" font-size="13">${esc(X_LABEL[kind])}</text>`,
  );
  parts.push(
    `<text transform="translate(${-46},${innerH / 2}) rotate(-90)" text-anchor="middle" font-size="13">${esc(Y_LABEL)}</text>`,
  );
  parts.push("</g></svg>");
  return parts.join("\n") + "\n";
}
