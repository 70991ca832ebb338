/** JSON contract of the animation service (docs/api.md in the toolkit). */

export interface EventRef {
  label: string;
  args: string[];
}

export interface EnabledEvent extends EventRef {
  text: string;
  successorCount: number;
}

export interface TraceStep {
  event: EventRef;
  choiceIndex: number;
}

export interface InvariantStatus {
  name: string;
  ok: boolean;
  pred?: string;
  error?: string;
}

export type ControlNode =
  | { kind: "elem" }
  | {
      kind: "automaton";
      name: string;
      current: string;
      states: string[];
      finals: string[];
      sub: ControlNode;
    }
  | { kind: "kleene"; started: boolean; sub: ControlNode }
  | {
      kind: "interleave" | "sync" | "weaksync";
      var: string;
      sort: string;
      instances: { atom: string; state: ControlNode }[];
    };

export interface Snapshot {
  sessionId: string;
  spec: string;
  control: ControlNode;
  data?: Record<string, string>;
  invariantStatus: InvariantStatus[];
  enabled: EnabledEvent[];
  trace: TraceStep[];
}

export interface Refusal {
  error: string;
  reason: string;
}
