import type {
  ControlNode, EnabledEvent, InvariantStatus, Snapshot, TraceStep,
} from "./types.js";

export interface ViewHandlers {
  onEvent(event: EnabledEvent, choiceIndex: number): void;
  onUndoTo(prefixLength: number): void;
  onUndo(): void;
  onReset(): void;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

/** Control tree as nested boxes: automaton states in a row with the current
 * one highlighted, a ring marker for Kleene closures, one column per
 * quantified instance. */
export function renderControl(node: ControlNode): HTMLElement {
  switch (node.kind) {
    case "elem": {
      return el("span", "ctl-elem");
    }
    case "automaton": {
      const box = el("div", "ctl-automaton");
      const head = el("div", "ctl-automaton-head", node.name);
      box.appendChild(head);
      const row = el("div", "ctl-state-row");
      for (const state of node.states) {
        const cell = el(
          "span",
          "ctl-state" +
            (state === node.current ? " current" : "") +
            (node.finals.includes(state) ? " final" : ""),
          state,
        );
        row.appendChild(cell);
      }
      box.appendChild(row);
      const sub = renderControl(node.sub);
      if (sub.textContent !== "" || sub.childElementCount > 0) {
        box.appendChild(sub);
      }
      return box;
    }
    case "kleene": {
      const box = el("div", "ctl-kleene" + (node.started ? " started" : ""));
      const marker = el("span", "ctl-kleene-marker", "↻");
      marker.title = node.started ? "closure started" : "closure not started";
      box.appendChild(marker);
      box.appendChild(renderControl(node.sub));
      return box;
    }
    default: {
      const box = el("div", "ctl-quant");
      const head = el(
        "div",
        "ctl-quant-head",
        `${node.kind} ${node.var} : ${node.sort}`,
      );
      box.appendChild(head);
      const columns = el("div", "ctl-instances");
      for (const instance of node.instances) {
        const col = el("div", "ctl-instance");
        col.dataset.atom = instance.atom;
        col.appendChild(el("div", "ctl-instance-head", instance.atom));
        col.appendChild(renderControl(instance.state));
        columns.appendChild(col);
      }
      box.appendChild(columns);
      return box;
    }
  }
}

export function renderData(data: Record<string, string>): HTMLElement {
  const table = el("table", "data-table");
  const head = el("tr");
  head.appendChild(el("th", undefined, "variable"));
  head.appendChild(el("th", undefined, "value"));
  table.appendChild(head);
  for (const [name, value] of Object.entries(data)) {
    const row = el("tr");
    row.dataset.variable = name;
    row.appendChild(el("td", "data-name", name));
    row.appendChild(el("td", "data-value", value));
    table.appendChild(row);
  }
  return table;
}

export function renderInvariants(status: InvariantStatus[]): HTMLElement {
  const box = el("div", "invariants");
  for (const inv of status) {
    const badge = el(
      "span",
      "invariant-badge " + (inv.ok ? "ok" : "violated"),
      inv.name,
    );
    badge.dataset.invariant = inv.name;
    if (!inv.ok) {
      const detail = inv.error ?? inv.pred ?? "";
      badge.appendChild(el("span", "invariant-pred", " " + detail));
    } else if (inv.pred) {
      badge.title = inv.pred;
    }
    box.appendChild(badge);
  }
  return box;
}

export function renderEnabled(
  events: EnabledEvent[],
  handlers: ViewHandlers,
): HTMLElement {
  const box = el("div", "enabled");
  if (events.length === 0) {
    box.appendChild(el("div", "enabled-empty", "no enabled events (deadlock)"));
    return box;
  }
  for (const event of events) {
    const wrap = el("div", "enabled-event");
    const button = el("button", "event-button", event.text);
    button.dataset.event = event.text;
    if (event.successorCount > 1) {
      button.appendChild(el("span", "choice-count", ` ×${event.successorCount}`));
      button.addEventListener("click", () => {
        // a nondeterministic event opens its successor-choice list
        const existing = wrap.querySelector(".choices");
        if (existing) {
          existing.remove();
          return;
        }
        const choices = el("div", "choices");
        for (let i = 0; i < event.successorCount; i += 1) {
          const choice = el("button", "choice-button", String(i));
          choice.dataset.choice = String(i);
          choice.addEventListener("click", () => handlers.onEvent(event, i));
          choices.appendChild(choice);
        }
        wrap.appendChild(choices);
      });
    } else {
      button.addEventListener("click", () => handlers.onEvent(event, 0));
    }
    wrap.appendChild(button);
    box.appendChild(wrap);
  }
  return box;
}

export function renderTrace(trace: TraceStep[], handlers: ViewHandlers): HTMLElement {
  const box = el("div", "trace");
  box.appendChild(el("div", "trace-head", `trace (${trace.length} steps)`));
  const list = el("ol", "trace-list");
  trace.forEach((step, index) => {
    const item = el("li", "trace-step");
    const text = `${step.event.label}(${step.event.args.join(", ")})` +
      (step.choiceIndex > 0 ? ` [${step.choiceIndex}]` : "");
    const button = el("button", "trace-button", text);
    button.title = "undo back to just before this step";
    button.dataset.prefix = String(index);
    button.addEventListener("click", () => handlers.onUndoTo(index));
    item.appendChild(button);
    list.appendChild(item);
  });
  box.appendChild(list);
  return box;
}

/** The whole view is a pure function of the snapshot: rendering the same
 * snapshot twice yields identical markup. */
export function renderSnapshot(snapshot: Snapshot, handlers: ViewHandlers): HTMLElement {
  const root = el("div", "animator");

  const bar = el("div", "toolbar");
  bar.appendChild(el("span", "spec-name", snapshot.spec));
  const undo = el("button", "undo-button", "undo");
  undo.addEventListener("click", () => handlers.onUndo());
  const reset = el("button", "reset-button", "reset");
  reset.addEventListener("click", () => handlers.onReset());
  bar.appendChild(undo);
  bar.appendChild(reset);
  bar.appendChild(renderInvariants(snapshot.invariantStatus));
  root.appendChild(bar);

  const main = el("div", "panels");
  const controlPanel = el("div", "panel control-panel");
  controlPanel.appendChild(el("h2", undefined, "control state"));
  controlPanel.appendChild(renderControl(snapshot.control));
  main.appendChild(controlPanel);

  const dataPanel = el("div", "panel data-panel");
  dataPanel.appendChild(el("h2", undefined, "data variables"));
  dataPanel.appendChild(renderData(snapshot.data ?? {}));
  main.appendChild(dataPanel);

  const eventPanel = el("div", "panel event-panel");
  eventPanel.appendChild(el("h2", undefined, "enabled events"));
  eventPanel.appendChild(renderEnabled(snapshot.enabled, handlers));
  main.appendChild(eventPanel);

  const tracePanel = el("div", "panel trace-panel");
  tracePanel.appendChild(renderTrace(snapshot.trace, handlers));
  main.appendChild(tracePanel);

  root.appendChild(main);
  return root;
}

export function renderToast(reason: string): HTMLElement {
  const toast = el("div", "toast refusal-toast");
  toast.setAttribute("role", "status");
  toast.appendChild(el("span", "toast-title", "event refused: "));
  toast.appendChild(el("span", "toast-reason", reason));
  return toast;
}
