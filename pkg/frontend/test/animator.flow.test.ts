import { spawn, type ChildProcess } from "node:child_process";
import { createInterface } from "node:readline";
import { fileURLToPath } from "node:url";
import path from "node:path";
import { afterAll, beforeAll, describe, expect, it } from "vitest";

import { AnimatorApi } from "../src/api.js";
import { AnimatorApp } from "../src/app.js";

const repoRoot = path.resolve(path.dirname(fileURLToPath(import.meta.url)), "..", "..");

let server: ChildProcess;
let baseUrl = "";

beforeAll(async () => {
  server = spawn(
    "python3",
    [
      "-m", "astdkit.cli", "serve",
      "corpus/trains_L1.astd", "corpus/trains_L2.astd",
      "--port", "0",
    ],
    { cwd: repoRoot, env: { ...process.env, PYTHONUNBUFFERED: "1" } },
  );
  baseUrl = await new Promise<string>((resolve, reject) => {
    const timer = setTimeout(() => reject(new Error("service did not start")), 30000);
    createInterface({ input: server.stdout! }).on("line", (line) => {
      const m = line.match(/listening on (http:\/\/[\d.]+:\d+)/);
      if (m) {
        clearTimeout(timer);
        resolve(m[1]!);
      }
    });
    server.on("exit", (code) => reject(new Error(`service exited: ${code}`)));
  });
});

afterAll(() => {
  server?.kill();
});

function mount(): { app: AnimatorApp; root: HTMLElement; toasts: HTMLElement } {
  document.body.innerHTML = '<div id="toasts"></div><div id="app"></div>';
  const root = document.getElementById("app")!;
  const toasts = document.getElementById("toasts")!;
  const app = new AnimatorApp(new AnimatorApi(baseUrl), root, toasts);
  return { app, root, toasts };
}

async function until(check: () => boolean, what: string, ms = 15000): Promise<void> {
  const deadline = Date.now() + ms;
  while (Date.now() < deadline) {
    if (check()) return;
    await new Promise((r) => setTimeout(r, 25));
  }
  throw new Error(`timed out waiting for ${what}`);
}

function click(root: HTMLElement, selector: string): void {
  const node = root.querySelector<HTMLButtonElement>(selector);
  if (!node) throw new Error(`nothing matches ${selector}`);
  node.click();
}

async function fire(
  root: HTMLElement, app: AnimatorApp, eventText: string, choice?: number,
): Promise<void> {
  const steps = app.snapshot!.trace.length;
  click(root, `[data-event="${eventText}"]`);
  if (choice !== undefined) {
    await until(
      () => root.querySelector(".choices") !== null,
      `choice list of ${eventText}`,
    );
    click(root, `.choice-button[data-choice="${choice}"]`);
  }
  await until(
    () => app.snapshot!.trace.length === steps + 1,
    `step ${eventText}`,
  );
}

describe("animator against the live service", () => {
  it("lists the served specifications", async () => {
    const api = new AnimatorApi(baseUrl);
    expect(await api.listSpecs()).toEqual(["trains_L1", "trains_L2"]);
  });

  it("drives start, the compute path, movement and stop; undoes to the "
     + "initial state; and toasts a refused event", async () => {
    const { app, root, toasts } = mount();
    await app.start("trains_L2");

    // documented initial snapshot: both trains idle, only starts enabled
    expect(root.querySelectorAll(".ctl-instance")).toHaveLength(2);
    expect(
      [...root.querySelectorAll(".event-button")].map((b) => b.getAttribute("data-event")),
    ).toEqual(["start(t1)", "start(t2)"]);
    expect(root.querySelector(".invariant-badge.violated")).toBeNull();
    const initialData = root.querySelector('tr[data-variable="position"] .data-value')!
      .textContent;
    expect(initialData).toBe("{}");

    // start(t1), nondeterministic: choose p1 via the successor list
    await fire(root, app, "start(t1)", 0);
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{ t1 |-> p1 }");
    const t1 = root.querySelector('.ctl-instance[data-atom="t1"]')!;
    expect(t1.querySelector(".ctl-state.current")!.textContent).toBe("s1_2");

    // the compute path: a movement authority appears
    await fire(root, app, "compute_l(t1)", 3);
    expect(root.querySelector('tr[data-variable="mal"] .data-value')!.textContent)
      .toBe("{ t1 |-> p4 }");

    // movement within the authority (nondeterministic: stay..limit)
    await fire(root, app, "movement(t1)", 2);
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{ t1 |-> p3 }");

    // recompute, then stop; keep a stale movement button for the toast check
    await fire(root, app, "compute_l(t1)", 0);
    const staleMovement = root.querySelector<HTMLButtonElement>(
      '[data-event="movement(t1)"]',
    )!;
    await fire(root, app, "stop(t1)");
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{}");
    expect(app.snapshot!.trace).toHaveLength(5);

    // click-to-undo on the first trace entry rolls all the way back
    click(root, '[data-prefix="0"]');
    await until(() => app.snapshot!.trace.length === 0, "undo to the initial state");
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{}");
    expect(root.querySelector('tr[data-variable="mal"] .data-value')!.textContent)
      .toBe("{}");
    expect(
      [...root.querySelectorAll(".event-button")].map((b) => b.getAttribute("data-event")),
    ).toEqual(["start(t1)", "start(t2)"]);

    // the stale button now names a disabled event: refusal comes back as a
    // non-blocking toast, the snapshot does not change
    staleMovement.click();
    await until(() => toasts.querySelector(".refusal-toast") !== null, "refusal toast");
    expect(toasts.querySelector(".toast-reason")!.textContent).toBe("control refuses");
    expect(app.snapshot!.trace).toHaveLength(0);
  });

  it("level-1 session: start, movement, stop with the Kleene marker", async () => {
    const { app, root } = mount();
    await app.start("trains_L1");
    await fire(root, app, "start(t1)", 1);
    const t1 = root.querySelector('.ctl-instance[data-atom="t1"]')!;
    expect(t1.querySelector(".ctl-kleene")).not.toBeNull();
    expect(t1.querySelector(".ctl-kleene.started")).toBeNull();
    await fire(root, app, "movement(t1)", 0);
    const t1after = root.querySelector('.ctl-instance[data-atom="t1"]')!;
    expect(t1after.querySelector(".ctl-kleene.started")).not.toBeNull();
    await fire(root, app, "stop(t1)");
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{}");
  });

  it("undo and reset buttons round-trip through the service", async () => {
    const { app, root } = mount();
    await app.start("trains_L1");
    await fire(root, app, "start(t2)", 2);
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{ t2 |-> p3 }");
    click(root, ".undo-button");
    await until(() => app.snapshot!.trace.length === 0, "undo");
    await fire(root, app, "start(t1)", 0);
    click(root, ".reset-button");
    await until(() => app.snapshot!.trace.length === 0, "reset");
    expect(root.querySelector('tr[data-variable="position"] .data-value')!.textContent)
      .toBe("{}");
  });
});
