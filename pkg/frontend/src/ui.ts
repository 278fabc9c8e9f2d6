import { ApiClient } from "./api";
import {
  DEFAULT_SERVER_URL,
  DISPLAY_PRESETS,
  DISTANCE_PRESETS,
  UiConfig,
  validateConfig,
} from "./config";
import { cssSizeForDevicePixels, mappingWarning } from "./dpr";
import { formatOutcome, SessionFlow } from "./flow";
import { orientationFromKey, orientationFromTap } from "./input";

// Plain-DOM application shell: a setup panel, a fullscreen black stage
// holding the stimulus at 1:1 device pixels, a brief mask between trials,
// and a result panel. The stimulus itself stays a server-rendered PNG;
// this client never sees the correct orientation until the trial log.

export class App {
  flow: SessionFlow | null = null;

  readonly root: HTMLElement;
  readonly setupPanel: HTMLElement;
  readonly stage: HTMLElement;
  readonly stimulusImg: HTMLImageElement;
  readonly maskEl: HTMLElement;
  readonly resultPanel: HTMLElement;
  readonly errorPanel: HTMLElement;
  readonly warningEl: HTMLElement;

  private objectUrl: string | null = null;

  constructor(
    root: HTMLElement,
    private doc: Document = document,
  ) {
    this.root = root;
    root.innerHTML = `
      <section id="setup">
        <h1>Stereoacuity test</h1>
        <p class="instructions">
          Put on the red/cyan glasses with the <strong>red filter on the left
          eye</strong>. A circle with a gap will appear; press the arrow key
          (or tap the screen side) matching the gap direction. Guess if unsure.
        </p>
        <label>Server
          <input id="server-url" value="${DEFAULT_SERVER_URL}">
        </label>
        <label>Display
          <select id="preset">
            ${Object.entries(DISPLAY_PRESETS)
              .map(([key, p]) => `<option value="${key}">${p.label}</option>`)
              .join("")}
            <option value="manual">manual ppi</option>
          </select>
        </label>
        <label>Pixels per inch <input id="ppi" type="number" value="264"></label>
        <label>Distance
          <select id="distance">
            <option value="near">near (0.5 m)</option>
            <option value="far">far (3 m)</option>
            <option value="custom">custom</option>
          </select>
        </label>
        <label>Custom distance (m) <input id="distance-m" type="number" value="0.5" step="0.1"></label>
        <p id="warning" class="warning"></p>
        <button id="start">Start test</button>
      </section>
      <section id="stage" hidden>
        <img id="stimulus" alt="">
        <div id="mask" hidden></div>
      </section>
      <section id="result" hidden></section>
      <section id="error" hidden>
        <p id="error-message"></p>
        <button id="retry">Retry</button>
      </section>
    `;
    this.setupPanel = this.byId("setup");
    this.stage = this.byId("stage");
    this.stimulusImg = this.byId("stimulus") as HTMLImageElement;
    this.maskEl = this.byId("mask");
    this.resultPanel = this.byId("result");
    this.errorPanel = this.byId("error");
    this.warningEl = this.byId("warning");
    this.wire();
  }

  private byId(id: string): HTMLElement {
    return this.root.querySelector(`#${id}`) as HTMLElement;
  }

  private wire() {
    const preset = this.byId("preset") as HTMLSelectElement;
    const ppi = this.byId("ppi") as HTMLInputElement;
    preset.addEventListener("change", () => {
      const chosen = DISPLAY_PRESETS[preset.value];
      if (chosen) ppi.value = String(chosen.ppi);
    });
    this.byId("start").addEventListener("click", () => void this.startSession());
    this.byId("retry").addEventListener("click", () => void this.flow?.retry());

    this.doc.defaultView?.addEventListener("keydown", (event) => {
      const orientation = orientationFromKey((event as KeyboardEvent).key);
      if (!orientation) return; // non-arrow keys never produce a request
      event.preventDefault();
      void this.flow?.respond(orientation);
    });
    this.stage.addEventListener("click", (event) => {
      const e = event as MouseEvent;
      const w = this.doc.defaultView?.innerWidth ?? 1;
      const h = this.doc.defaultView?.innerHeight ?? 1;
      void this.flow?.respond(orientationFromTap(e.clientX, e.clientY, w, h));
    });

    this.stimulusImg.addEventListener("load", () => this.applyPixelMapping());
  }

  readConfig(): UiConfig {
    const distanceChoice = (this.byId("distance") as HTMLSelectElement).value;
    const distanceM =
      distanceChoice in DISTANCE_PRESETS
        ? DISTANCE_PRESETS[distanceChoice]
        : Number((this.byId("distance-m") as HTMLInputElement).value);
    return {
      serverUrl: (this.byId("server-url") as HTMLInputElement).value.trim(),
      ppi: Number((this.byId("ppi") as HTMLInputElement).value),
      distanceM,
    };
  }

  async startSession(seed?: number): Promise<void> {
    const config = this.readConfig();
    const problem = validateConfig(config);
    if (problem) {
      this.warningEl.textContent = problem;
      return;
    }
    const api = new ApiClient(config.serverUrl);
    this.flow = new SessionFlow(api, config, {
      onStimulus: (blob, trialIndex) => this.showStimulus(blob, trialIndex),
      onMask: () => this.showMask(),
      onFinished: (result) => {
        this.stage.hidden = true;
        this.resultPanel.hidden = false;
        const seconds = (result.elapsedMs / 1000).toFixed(0);
        this.resultPanel.innerHTML = `
          <h1>Result</h1>
          <p id="outcome">${formatOutcome(result)}</p>
          <p id="trial-count">${result.trialCount} trials, ${seconds} s</p>
        `;
      },
      onError: (message, retryable) => {
        this.errorPanel.hidden = false;
        this.byId("error-message").textContent = message;
        (this.byId("retry") as HTMLButtonElement).hidden = !retryable;
      },
    });
    this.setupPanel.hidden = true;
    this.resultPanel.hidden = true;
    this.errorPanel.hidden = true;
    this.stage.hidden = false;
    await this.enterFullscreen();
    await this.flow.start(seed);
  }

  private async enterFullscreen(): Promise<void> {
    try {
      await this.stage.requestFullscreen?.();
    } catch {
      // fullscreen is best-effort; 1:1 pixel mapping is what matters
    }
  }

  private showStimulus(blob: Blob, _trialIndex: number) {
    this.errorPanel.hidden = true;
    this.maskEl.hidden = true;
    if (this.objectUrl) URL.revokeObjectURL?.(this.objectUrl);
    this.objectUrl = URL.createObjectURL?.(blob) ?? "";
    this.stimulusImg.src = this.objectUrl;
    this.stimulusImg.hidden = false;
  }

  private applyPixelMapping() {
    const imagePx = this.stimulusImg.naturalWidth;
    if (!imagePx) return;
    const dpr = this.doc.defaultView?.devicePixelRatio ?? 1;
    const cssSize = cssSizeForDevicePixels(imagePx, dpr);
    this.stimulusImg.style.width = `${cssSize}px`;
    this.stimulusImg.style.height = `${cssSize}px`;
    this.stimulusImg.style.imageRendering = "pixelated";
    const warning = mappingWarning(imagePx, dpr);
    this.warningEl.textContent = warning ?? "";
  }

  private showMask() {
    this.stimulusImg.hidden = true;
    this.maskEl.hidden = false;
  }
}

export function mount(root: HTMLElement, doc: Document = document): App {
  return new App(root, doc);
}
