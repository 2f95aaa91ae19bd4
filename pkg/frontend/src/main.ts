import { TriageClient } from "./api.js";
import { TriageApp } from "./app.js";
import { ReviewSession } from "./state.js";

function mount(): void {
  const banner = document.getElementById("banner");
  const queue = document.getElementById("queue");
  const detail = document.getElementById("detail");
  if (!banner || !queue || !detail) {
    console.error("triage UI containers missing from index.html");
    return;
  }
  const params = new URLSearchParams(window.location.search);
  const reviewer = params.get("reviewer") ?? "reviewer";
  const app = new TriageApp(new TriageClient(""), new ReviewSession(reviewer), {
    banner,
    queue,
    detail,
  });
  void app.start();
}

mount();
