// Browser bootstrap: same-origin API, #app as the mount point.

import { ApiClient } from "./api.js";
import { App } from "./app.js";

const root = document.getElementById("app");
if (!root) throw new Error("missing #app mount point");

const app = new App(document, root, new ApiClient(""));

document.getElementById("nav-dashboard")?.addEventListener("click", () => {
  void app.showDashboard();
});
document.getElementById("nav-trials")?.addEventListener("click", () => {
  void app.loadNextTrial();
});

void app.start();
