/** Tiny DOM builders; rendering plumbing only, no data decisions. */

type Child = Node | string;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  attrs: Record<string, string> = {},
  children: Child[] = [],
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  for (const [key, value] of Object.entries(attrs)) node.setAttribute(key, value);
  for (const child of children) node.append(child);
  return node;
}

export function clear(node: HTMLElement): void {
  while (node.firstChild) node.removeChild(node.firstChild);
}

export function button(
  label: string,
  options: { enabled?: boolean; className?: string },
  onClick: () => void,
): HTMLButtonElement {
  const node = el("button", { type: "button" }, [label]);
  if (options.className) node.className = options.className;
  if (options.enabled === false) node.disabled = true;
  node.addEventListener("click", onClick);
  return node;
}
