// Browser bootstrap: wires the controller to the document and live fetch.

import { Api } from "./api.js";
import { SessionController } from "./app.js";
import type { OperatorName } from "./types.js";

const REPLAY_MS = 400;

export function mount(root: HTMLElement, api = new Api("")): SessionController {
  const controller = new SessionController(api);
  let replayTimer: number | undefined;

  const draw = () => {
    root.innerHTML = controller.render();
  };

  const schedule = () => {
    if (replayTimer !== undefined) clearInterval(replayTimer);
    replayTimer = window.setInterval(() => {
      if (controller.replayTick()) draw();
      else if (replayTimer !== undefined && controller.replayComplete) {
        clearInterval(replayTimer);
        replayTimer = undefined;
        draw();
      }
    }, REPLAY_MS);
  };

  root.addEventListener("click", (event) => {
    const target = event.target as HTMLElement;
    const card = target.closest<HTMLElement>(".card");
    if (card?.dataset.itemset) {
      controller.pickCard(Number(card.dataset.itemset));
      draw();
      return;
    }
    const opButton = target.closest<HTMLElement>("button.op");
    if (opButton?.dataset.op && !(opButton as HTMLButtonElement).disabled) {
      controller.pickOperator(opButton.dataset.op as OperatorName);
      draw();
      return;
    }
    const suggestion = target.closest<HTMLElement>(".suggestion");
    if (suggestion?.dataset.index) {
      controller.applySuggestion(Number(suggestion.dataset.index));
      draw();
      return;
    }
    const control = target.closest<HTMLElement>("[data-control]");
    if (!control) return;
    switch (control.dataset.control) {
      case "submit":
        void controller.submit().then(draw);
        break;
      case "dismiss":
        controller.dismissBanner();
        draw();
        break;
      case "pause":
        controller.pauseReplay();
        draw();
        break;
      case "resume":
        controller.startReplay();
        schedule();
        draw();
        break;
    }
  });

  root.addEventListener("change", (event) => {
    const select = event.target as HTMLSelectElement;
    if (select.matches("select.attribute")) {
      controller.pickAttribute(select.value || null);
      draw();
    }
  });

  const params = new URLSearchParams(window.location.search);
  void controller
    .create({
      dataset: params.get("dataset") ?? "demo",
      mode: params.get("mode") ?? "manual",
      strategy: params.get("strategy") ?? "top1sum",
      k: Number(params.get("k") ?? 10),
      t: Number(params.get("t") ?? 50),
    })
    .then(() => {
      draw();
      if (controller.replay) {
        controller.startReplay();
        schedule();
      }
    });

  return controller;
}

declare global {
  interface Window {
    summexMount?: typeof mount;
  }
}

if (typeof window !== "undefined") {
  window.summexMount = mount;
  const root = document.getElementById("app");
  if (root) mount(root);
}
