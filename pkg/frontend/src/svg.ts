/** Fixed two-decimal coordinate formatting keeps regenerated files
 * byte-identical across runs and platforms. */
export function fmt(value: number): string {
  const out = value.toFixed(2);
  return out === "-0.00" ? "0.00" : out;
}

export function escapeText(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;");
}

export function tag(name: string, attrs: Record<string, string>, body?: string): string {
  const parts = Object.entries(attrs).map(([key, value]) => `${key}="${value}"`);
  const head = parts.length > 0 ? `${name} ${parts.join(" ")}` : name;
  if (body === undefined) {
    return `<${head}/>`;
  }
  return `<${head}>${body}</${name}>`;
}

export function line(x1: number, y1: number, x2: number, y2: number, width = 1): string {
  return tag("line", {
    x1: fmt(x1),
    y1: fmt(y1),
    x2: fmt(x2),
    y2: fmt(y2),
    stroke: "black",
    "stroke-width": String(width),
  });
}

export function text(
  x: number,
  y: number,
  body: string,
  attrs: Record<string, string> = {},
): string {
  return tag(
    "text",
    { x: fmt(x), y: fmt(y), "font-family": "sans-serif", "font-size": "12", ...attrs },
    escapeText(body),
  );
}
