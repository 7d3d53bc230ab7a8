/** Pure view-state logic: the linked chart cursor and the weight editor.
 * Kept DOM-free so the invariants (cursor timestamp validity, committed
 * sliders summing to exactly 100) are directly unit-testable. */

export const CATEGORIES = [
  "RELIABILITY",
  "SECURITY",
  "MAINTAINABILITY",
  "COVERAGE",
  "DUPLICATION",
] as const;

export type Category = (typeof CATEGORIES)[number];

export type SliderValues = Record<Category, number>;

export interface LinkedCursorState {
  hoveredTimestamp: number | null;
  selectedRun: string | null;
  visibleMetrics: Set<string>;
}

export function initialCursorState(): LinkedCursorState {
  return { hoveredTimestamp: null, selectedRun: null, visibleMetrics: new Set() };
}

/** Hovering is only valid on one of the run's snapshot timestamps. */
export function setHover(
  state: LinkedCursorState,
  timestamp: number | null,
  validTimestamps: readonly number[],
): LinkedCursorState {
  if (timestamp !== null && !validTimestamps.includes(timestamp)) {
    return state;
  }
  return { ...state, hoveredTimestamp: timestamp };
}

export function defaultSliders(): SliderValues {
  return {
    RELIABILITY: 30,
    SECURITY: 50,
    MAINTAINABILITY: 20,
    COVERAGE: 0,
    DUPLICATION: 0,
  };
}

export function sliderSum(sliders: SliderValues): number {
  return CATEGORIES.reduce((sum, c) => sum + sliders[c], 0);
}

/**
 * Set one slider and proportionally rescale the others so the committed
 * state sums to exactly 100. Integer redistribution uses largest-remainder
 * rounding with category order as the deterministic tie-break.
 */
export function rebalance(
  sliders: SliderValues,
  changed: Category,
  rawValue: number,
): SliderValues {
  const value = Math.max(0, Math.min(100, Math.round(rawValue)));
  const others = CATEGORIES.filter((c) => c !== changed);
  const remaining = 100 - value;
  const otherSum = others.reduce((sum, c) => sum + sliders[c], 0);
  const out: SliderValues = { ...sliders, [changed]: value };

  if (otherSum === 0) {
    const base = Math.floor(remaining / others.length);
    let extra = remaining - base * others.length;
    for (const c of others) {
      out[c] = base + (extra > 0 ? 1 : 0);
      if (extra > 0) extra -= 1;
    }
    return out;
  }

  const exact = others.map((c) => (sliders[c] * remaining) / otherSum);
  const floors = exact.map(Math.floor);
  let leftover = remaining - floors.reduce((a, b) => a + b, 0);
  const byRemainder = others
    .map((c, i) => ({ c, i, frac: exact[i] - floors[i] }))
    .sort((a, b) => b.frac - a.frac || a.i - b.i);
  const bonus = new Set(byRemainder.slice(0, leftover).map((entry) => entry.c));
  others.forEach((c, i) => {
    out[c] = floors[i] + (bonus.has(c) ? 1 : 0);
  });
  return out;
}

/** Integer percents to the weight map the API expects (sums to 1). */
export function toWeights(sliders: SliderValues): Record<string, number> {
  const weights: Record<string, number> = {};
  for (const c of CATEGORIES) {
    if (sliders[c] > 0) {
      weights[c] = sliders[c] / 100;
    }
  }
  return weights;
}
