/** Axis scales and tick placement. Everything here is a pure function of the
 *  inputs so repeated renders produce identical output. */

export interface Scale {
  domain: [number, number];
  ticks: number[];
  map(value: number): number;
}

function tickStep(lo: number, hi: number, count: number): number {
  const raw = (hi - lo) / Math.max(count, 1);
  const mag = Math.pow(10, Math.floor(Math.log10(raw)));
  const norm = raw / mag;
  if (norm <= 1) return mag;
  if (norm <= 2) return 2 * mag;
  if (norm <= 5) return 5 * mag;
  return 10 * mag;
}

export function linearTicks(lo: number, hi: number, count = 6): number[] {
  if (!(hi > lo)) return [lo];
  const step = tickStep(lo, hi, count);
  const start = Math.ceil(lo / step) * step;
  const ticks: number[] = [];
  for (let k = 0; ; k++) {
    const v = start + k * step;
    if (v > hi + step * 1e-9) break;
    ticks.push(Math.abs(v) < step * 1e-9 ? 0 : v);
  }
  return ticks;
}

export function logTicks(lo: number, hi: number): number[] {
  const decades: number[] = [];
  const kLo = Math.ceil(Math.log10(lo) - 1e-9);
  const kHi = Math.floor(Math.log10(hi) + 1e-9);
  for (let k = kLo; k <= kHi; k++) decades.push(Math.pow(10, k));
  if (decades.length >= 2) return decades;
  // narrow range: fall back to a 1-2-5 ladder so the axis is not blank
  const ticks: number[] = [];
  for (let k = Math.floor(Math.log10(lo)) - 1; k <= kHi + 1; k++) {
    for (const m of [1, 2, 5]) {
      const v = m * Math.pow(10, k);
      if (v >= lo * (1 - 1e-9) && v <= hi * (1 + 1e-9)) ticks.push(v);
    }
  }
  return ticks.length > 0 ? ticks : [lo, hi];
}

export function linearScale(
  domain: [number, number],
  range: [number, number],
  tickCount = 6,
): Scale {
  const [d0, d1] = domain;
  const [r0, r1] = range;
  const span = d1 - d0 || 1;
  return {
    domain,
    ticks: linearTicks(d0, d1, tickCount),
    map: (v) => r0 + ((v - d0) / span) * (r1 - r0),
  };
}

export function logScale(domain: [number, number], range: [number, number]): Scale {
  const [d0, d1] = domain;
  if (!(d0 > 0) || !(d1 > 0)) {
    throw new Error(`log scale needs a positive domain, got [${d0}, ${d1}]`);
  }
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  const [r0, r1] = range;
  return {
    domain,
    ticks: logTicks(d0, d1),
    map: (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0),
  };
}

export function extent(values: readonly number[]): [number, number] {
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of values) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  if (!(lo <= hi)) throw new Error("extent of an empty sequence");
  return [lo, hi];
}

export function padded(domain: [number, number], frac = 0.05): [number, number] {
  const [lo, hi] = domain;
  const span = hi - lo;
  if (span === 0) {
    const d = lo !== 0 ? Math.abs(lo) * 0.1 : 1;
    return [lo - d, hi + d];
  }
  return [lo - frac * span, hi + frac * span];
}

export function formatTick(v: number): string {
  if (v === 0) return "0";
  const a = Math.abs(v);
  if (a >= 1e4 || a < 1e-3) {
    const [mantissa, exp] = v.toExponential(3).split("e") as [string, string];
    const m = mantissa.replace(/\.?0+$/, "");
    return `${m}e${exp.replace("+", "")}`;
  }
  return String(parseFloat(v.toPrecision(6)));
}
