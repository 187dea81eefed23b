/**
 * DOM rendering for the console. One instance owns the static page
 * skeleton in index.html; nothing here talks to the network.
 */

import { Polarity, QueryPayload, StatusPayload } from "./api.js";

function formatKappa(kappa: number | null): string {
  return kappa === null ? "n/a" : kappa.toFixed(3);
}

export class DomView {
  private readonly banner: HTMLElement;
  private readonly toast: HTMLElement;
  private readonly idle: HTMLElement;
  private readonly card: HTMLElement;
  private readonly docId: HTMLElement;
  private readonly predicted: HTMLElement;
  private readonly score: HTMLElement;
  private readonly words: HTMLElement;
  private readonly position: HTMLElement;
  private readonly streamLength: HTMLElement;
  private readonly spend: HTMLElement;
  private readonly kappa: HTMLElement;
  private readonly vocab: HTMLElement;
  private readonly posButton: HTMLButtonElement;
  private readonly negButton: HTMLButtonElement;
  private busy = false;
  private toastTimer: ReturnType<typeof setTimeout> | null = null;

  constructor(
    doc: Document,
    private readonly onAnswer: (label: Polarity) => void,
  ) {
    const grab = (id: string): HTMLElement => {
      const el = doc.getElementById(id);
      if (el === null) {
        throw new Error(`console page is missing #${id}`);
      }
      return el;
    };
    this.banner = grab("banner");
    this.toast = grab("toast");
    this.idle = grab("idle");
    this.card = grab("query-card");
    this.docId = grab("doc-id");
    this.predicted = grab("predicted");
    this.score = grab("score");
    this.words = grab("words");
    this.position = grab("position");
    this.streamLength = grab("stream-length");
    this.spend = grab("spend");
    this.kappa = grab("kappa");
    this.vocab = grab("vocab");
    this.posButton = grab("answer-pos") as HTMLButtonElement;
    this.negButton = grab("answer-neg") as HTMLButtonElement;
    this.posButton.addEventListener("click", () => this.answer("pos"));
    this.negButton.addEventListener("click", () => this.answer("neg"));
    this.renderIdle();
  }

  private answer(label: Polarity): void {
    // Guard here as well as in the controller: a disabled button still
    // receives synthetic clicks and keyboard-driven calls.
    if (!this.busy && !this.card.classList.contains("hidden")) {
      this.onAnswer(label);
    }
  }

  /** Keyboard path for the same two answers as the buttons. */
  bindKeys(doc: Document): void {
    doc.addEventListener("keydown", (event: KeyboardEvent) => {
      if (event.repeat || event.altKey || event.ctrlKey || event.metaKey) {
        return;
      }
      if (event.key === "p") {
        this.answer("pos");
      } else if (event.key === "n") {
        this.answer("neg");
      }
    });
  }

  renderIdle(): void {
    this.card.classList.add("hidden");
    this.idle.classList.remove("hidden");
    this.applyBusy();
  }

  renderQuery(query: QueryPayload): void {
    this.docId.textContent = String(query.doc_id);
    this.predicted.textContent = query.predicted === "pos" ? "positive" : "negative";
    this.score.textContent = query.score === null ? "n/a" : query.score.toFixed(4);
    // textContent per word: documents are untrusted text.
    this.words.replaceChildren(
      ...query.words.map((word) => {
        const span = this.words.ownerDocument.createElement("span");
        span.className = "word";
        span.textContent = word;
        return span;
      }),
    );
    this.idle.classList.add("hidden");
    this.card.classList.remove("hidden");
    this.applyBusy();
  }

  renderStatus(status: StatusPayload): void {
    this.position.textContent = String(status.position);
    this.streamLength.textContent = String(status.stream_length);
    this.spend.textContent = String(status.spend_percent);
    this.kappa.textContent = formatKappa(status.kappa);
    this.vocab.textContent = String(status.vocab_size);
  }

  renderDone(): void {
    this.card.classList.add("hidden");
    this.idle.textContent = "run complete. results are on disk.";
    this.idle.classList.remove("hidden");
    this.applyBusy();
  }

  setBusy(busy: boolean): void {
    this.busy = busy;
    this.applyBusy();
  }

  setConnected(connected: boolean): void {
    this.banner.classList.toggle("hidden", connected);
  }

  showError(message: string): void {
    this.toast.textContent = message;
    this.toast.classList.remove("hidden");
    if (this.toastTimer !== null) {
      clearTimeout(this.toastTimer);
    }
    this.toastTimer = setTimeout(() => this.toast.classList.add("hidden"), 4000);
  }

  private applyBusy(): void {
    const answerable = !this.busy && !this.card.classList.contains("hidden");
    this.posButton.disabled = !answerable;
    this.negButton.disabled = !answerable;
  }
}
