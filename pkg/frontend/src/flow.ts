import { Orientation, ResponseResult, SessionApi } from "./api";
import type { UiConfig } from "./config";

// Session state machine, kept free of DOM concerns so it can be driven
// headlessly. The UI renders whatever the hooks hand it. At most one
// request is in flight: responses are only accepted in the
// "awaiting-response" state, so stray key presses never produce requests.

export type FlowState =
  | "idle"
  | "creating"
  | "loading-stimulus"
  | "awaiting-response"
  | "masking"
  | "finished"
  | "error";

export interface SessionResult {
  outcome: number | "OL" | null;
  outcomeRounded: number | "OL" | null;
  trialCount: number;
  elapsedMs: number;
}

export interface FlowHooks {
  onStimulus(stimulus: Blob, trialIndex: number): void;
  onMask(): void;
  onFinished(result: SessionResult): void;
  onError(message: string, retryable: boolean): void;
  onStateChange?(state: FlowState): void;
}

export const MASK_MS = 200;

const sleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class SessionFlow {
  state: FlowState = "idle";
  sessionId: string | null = null;
  trialIndex = 0;
  result: SessionResult | null = null;

  private startedAt = 0;
  private trialShownAt = 0;
  private pendingStep: (() => Promise<void>) | null = null;

  constructor(
    private api: SessionApi,
    private config: UiConfig,
    private hooks: FlowHooks,
    private maskMs: number = MASK_MS,
  ) {}

  private setState(state: FlowState) {
    this.state = state;
    this.hooks.onStateChange?.(state);
  }

  private async guarded(step: () => Promise<void>): Promise<void> {
    this.pendingStep = step;
    try {
      await step();
      this.pendingStep = null;
    } catch (err) {
      this.setState("error");
      const message = err instanceof Error ? err.message : String(err);
      // The session id survives; retry() re-runs the failed step.
      this.hooks.onError(message, this.sessionId !== null);
    }
  }

  async start(seed?: number): Promise<void> {
    if (this.state !== "idle") return;
    this.startedAt = Date.now();
    await this.guarded(async () => {
      this.setState("creating");
      const created = await this.api.createSession({
        ppi: this.config.ppi,
        distance_m: this.config.distanceM,
        ...(seed !== undefined ? { seed } : {}),
      });
      this.sessionId = created.session_id;
      await this.loadStimulus();
    });
  }

  private async loadStimulus(): Promise<void> {
    this.setState("loading-stimulus");
    const blob = await this.api.fetchStimulus(this.sessionId!);
    this.trialShownAt = Date.now();
    this.hooks.onStimulus(blob, this.trialIndex);
    this.setState("awaiting-response");
  }

  async respond(orientation: Orientation): Promise<void> {
    if (this.state !== "awaiting-response" || !this.sessionId) return;
    await this.guarded(async () => {
      this.setState("masking");
      const elapsed = Date.now() - this.trialShownAt;
      const result: ResponseResult = await this.api.postResponse(
        this.sessionId!,
        orientation,
        elapsed,
      );
      this.trialIndex = result.trial_count;
      if (result.finished) {
        this.result = {
          outcome: result.outcome,
          outcomeRounded: result.outcome_rounded,
          trialCount: result.trial_count,
          elapsedMs: Date.now() - this.startedAt,
        };
        this.setState("finished");
        this.hooks.onFinished(this.result);
        return;
      }
      this.hooks.onMask();
      await sleep(this.maskMs);
      await this.loadStimulus();
    });
  }

  async retry(): Promise<void> {
    if (this.state !== "error") return;
    const step = this.pendingStep;
    if (!step) return;
    if (this.sessionId) {
      // Resync from the server instead of re-posting: if the lost call
      // actually landed the session has advanced (possibly finished), and
      // the pending stimulus fetch is idempotent either way.
      await this.guarded(async () => {
        const record = (await this.api.fetchSession(this.sessionId!)) as {
          outcome: number | "OL" | null;
          trials: unknown[];
        };
        this.trialIndex = record.trials.length;
        if (record.outcome !== null) {
          this.result = {
            outcome: record.outcome,
            outcomeRounded:
              record.outcome === "OL" ? "OL" : Math.round(record.outcome as number),
            trialCount: record.trials.length,
            elapsedMs: Date.now() - this.startedAt,
          };
          this.setState("finished");
          this.hooks.onFinished(this.result);
          return;
        }
        await this.loadStimulus();
      });
    } else {
      await this.guarded(step);
    }
  }
}

export function formatOutcome(result: SessionResult): string {
  if (result.outcomeRounded === "OL" || result.outcome === "OL") {
    return "outside device limits";
  }
  if (result.outcomeRounded == null) {
    return "no result";
  }
  return `${result.outcomeRounded} arcsec`;
}
