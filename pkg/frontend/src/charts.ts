/** SVG metric charts with a linked hover cursor.
 *
 * Every chart keeps the raw value array it was given (the UI invariant is
 * that rendered data equals the API payload exactly; only axis labels are
 * formatted). Hovering any chart reports the snapshot timestamp under the
 * pointer; the coordinator moves the cursor on every chart to that same
 * timestamp and stamps it into data-cursor-ts for inspection and tests.
 */

const SVG_NS = "http://www.w3.org/2000/svg";

const WIDTH = 720;
const HEIGHT = 130;
const PAD_LEFT = 58;
const PAD_RIGHT = 12;
const PAD_TOP = 16;
const PAD_BOTTOM = 20;

export interface ChartHandle {
  readonly name: string;
  readonly element: HTMLElement;
  readonly values: readonly (number | null)[];
  readonly timestamps: readonly number[];
  setCursor(timestamp: number | null): void;
}

export interface ChartOptions {
  name: string;
  timestamps: number[];
  values: (number | null)[];
  color?: string;
  onHover?: (timestamp: number | null) => void;
}

function svgEl<K extends keyof SVGElementTagNameMap>(
  tag: K,
  attrs: Record<string, string>,
): SVGElementTagNameMap[K] {
  const el = document.createElementNS(SVG_NS, tag);
  for (const [key, value] of Object.entries(attrs)) {
    el.setAttribute(key, value);
  }
  return el;
}

export function renderMetricChart(options: ChartOptions): ChartHandle {
  const { name, timestamps, values } = options;
  const color = options.color ?? "#2c6fb3";

  const root = document.createElement("div");
  root.className = "chart";
  root.dataset.metric = name;

  const title = document.createElement("div");
  title.className = "chart-title";
  title.textContent = name;
  root.appendChild(title);

  const svg = svgEl("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    width: String(WIDTH),
    height: String(HEIGHT),
  });
  root.appendChild(svg);

  const present = values.filter((v): v is number => v !== null);
  const lo = present.length ? Math.min(...present) : 0;
  const hi = present.length ? Math.max(...present) : 1;
  const span = hi - lo || 1;

  const x = (i: number) => {
    if (timestamps.length <= 1) return PAD_LEFT + (WIDTH - PAD_LEFT - PAD_RIGHT) / 2;
    return (
      PAD_LEFT + ((WIDTH - PAD_LEFT - PAD_RIGHT) * i) / (timestamps.length - 1)
    );
  };
  const y = (v: number) =>
    HEIGHT - PAD_BOTTOM - ((HEIGHT - PAD_TOP - PAD_BOTTOM) * (v - lo)) / span;

  // axis labels (display-only formatting; the data stays untouched)
  svg.appendChild(svgEl("line", {
    x1: String(PAD_LEFT), y1: String(HEIGHT - PAD_BOTTOM),
    x2: String(WIDTH - PAD_RIGHT), y2: String(HEIGHT - PAD_BOTTOM),
    stroke: "#ccc",
  }));
  const loLabel = svgEl("text", {
    x: "4", y: String(y(lo) + 4), class: "axis-label",
  });
  loLabel.textContent = formatLabel(lo);
  const hiLabel = svgEl("text", {
    x: "4", y: String(y(hi) + 4), class: "axis-label",
  });
  hiLabel.textContent = formatLabel(hi);
  svg.appendChild(loLabel);
  svg.appendChild(hiLabel);

  // polyline segments; gaps (null values) break the line
  let segment: string[] = [];
  const flush = () => {
    if (segment.length > 1) {
      svg.appendChild(svgEl("polyline", {
        points: segment.join(" "),
        fill: "none",
        stroke: color,
        "stroke-width": "1.6",
      }));
    }
    segment = [];
  };
  values.forEach((value, i) => {
    if (value === null) {
      flush();
      return;
    }
    segment.push(`${x(i).toFixed(1)},${y(value).toFixed(1)}`);
  });
  flush();

  values.forEach((value, i) => {
    if (value === null) return;
    svg.appendChild(svgEl("circle", {
      cx: x(i).toFixed(1), cy: y(value).toFixed(1), r: "2.4", fill: color,
    }));
  });

  // hover cursor (one vertical line, moved by the coordinator)
  const cursor = svgEl("line", {
    y1: String(PAD_TOP),
    y2: String(HEIGHT - PAD_BOTTOM),
    stroke: "#e67e22",
    "stroke-width": "1.2",
    visibility: "hidden",
    class: "cursor-line",
  });
  svg.appendChild(cursor);

  // invisible hover strips, one per snapshot
  timestamps.forEach((ts, i) => {
    const left = i === 0 ? PAD_LEFT : (x(i - 1) + x(i)) / 2;
    const right = i === timestamps.length - 1 ? WIDTH - PAD_RIGHT : (x(i) + x(i + 1)) / 2;
    const strip = svgEl("rect", {
      x: left.toFixed(1),
      y: String(PAD_TOP),
      width: Math.max(right - left, 1).toFixed(1),
      height: String(HEIGHT - PAD_TOP - PAD_BOTTOM),
      fill: "transparent",
      "data-ts": String(ts),
    });
    strip.addEventListener("mouseenter", () => options.onHover?.(ts));
    svg.appendChild(strip);
  });
  svg.addEventListener("mouseleave", () => options.onHover?.(null));

  const handle: ChartHandle = {
    name,
    element: root,
    values,
    timestamps,
    setCursor(timestamp: number | null): void {
      if (timestamp === null) {
        cursor.setAttribute("visibility", "hidden");
        delete root.dataset.cursorTs;
        return;
      }
      const index = timestamps.indexOf(timestamp);
      if (index < 0) {
        cursor.setAttribute("visibility", "hidden");
        delete root.dataset.cursorTs;
        return;
      }
      const cx = x(index).toFixed(1);
      cursor.setAttribute("x1", cx);
      cursor.setAttribute("x2", cx);
      cursor.setAttribute("visibility", "visible");
      root.dataset.cursorTs = String(timestamp);
    },
  };
  return handle;
}

/** Wire charts together: hovering any one highlights the same timestamp on all. */
export function linkCharts(
  charts: ChartHandle[],
  onChange?: (timestamp: number | null) => void,
): (timestamp: number | null) => void {
  const broadcast = (timestamp: number | null) => {
    for (const chart of charts) {
      chart.setCursor(timestamp);
    }
    onChange?.(timestamp);
  };
  return broadcast;
}

function formatLabel(value: number): string {
  if (Number.isInteger(value)) return String(value);
  return value.toFixed(2);
}
