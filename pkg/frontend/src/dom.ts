// Tiny DOM construction helper; keeps the panels free of innerHTML plumbing.

type Child = Node | string | null | undefined;

export function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  props: {
    className?: string;
    text?: string;
    title?: string;
    src?: string;
    dataset?: Record<string, string>;
    style?: Partial<CSSStyleDeclaration>;
    onClick?: (event: MouseEvent) => void;
  } = {},
  ...children: Child[]
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (props.className) node.className = props.className;
  if (props.text !== undefined) node.textContent = props.text;
  if (props.title) node.title = props.title;
  if (props.src && node instanceof HTMLImageElement) node.src = props.src;
  if (props.dataset) {
    for (const [key, value] of Object.entries(props.dataset)) {
      node.dataset[key] = value;
    }
  }
  if (props.style) Object.assign(node.style, props.style);
  if (props.onClick) {
    const handler = props.onClick;
    node.addEventListener("click", (event) => handler(event as MouseEvent));
  }
  for (const child of children) {
    if (child === null || child === undefined) continue;
    node.append(child);
  }
  return node;
}
