// Top-down schematic of one trial: a box outline with one chip per scene
// object, footprint scaled from the object's bounding box. The replay
// highlights chips in the server-provided order; nothing about the
// sequence's origin is known here, let alone rendered.

import type { TrialObject, TrialPayload } from "./api.js";
import { currentObject, revealed, type ReplayState } from "./replay.js";

const PX_PER_METER = 520;
const MIN_CHIP_PX = 26;

function chipSize(object: TrialObject): { width: number; height: number } {
  const [w, d] = object.bbox;
  return {
    width: Math.max(MIN_CHIP_PX, Math.round(w * PX_PER_METER)),
    height: Math.max(MIN_CHIP_PX, Math.round(d * PX_PER_METER)),
  };
}

export function renderScene(doc: Document, trial: TrialPayload): HTMLElement {
  const scene = doc.createElement("div");
  scene.className = "scene";
  for (const object of trial.objects) {
    const chip = doc.createElement("div");
    chip.className = "chip";
    chip.dataset.objectId = object.object_id;
    const { width, height } = chipSize(object);
    chip.style.width = `${width}px`;
    chip.style.height = `${height}px`;
    const label = doc.createElement("span");
    label.textContent = object.name;
    chip.appendChild(label);
    scene.appendChild(chip);
  }
  return scene;
}

/** Apply replay progress to an already-rendered scene. */
export function updateHighlights(scene: HTMLElement, replay: ReplayState): void {
  const shown = new Set(revealed(replay));
  const current = currentObject(replay);
  for (const chip of Array.from(scene.querySelectorAll<HTMLElement>(".chip"))) {
    const id = chip.dataset.objectId ?? "";
    chip.classList.toggle("packed", shown.has(id) && id !== current);
    chip.classList.toggle("current", id === current);
  }
}

export function renderPickedList(doc: Document, trial: TrialPayload, replay: ReplayState): HTMLElement {
  const names = new Map(trial.objects.map((o) => [o.object_id, o.name]));
  const list = doc.createElement("ol");
  list.className = "picked-list";
  for (const id of revealed(replay)) {
    const item = doc.createElement("li");
    item.textContent = names.get(id) ?? id;
    list.appendChild(item);
  }
  return list;
}
