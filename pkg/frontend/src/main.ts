import { mountApp } from "./app";

function required<T extends Element>(selector: string): T {
  const element = document.querySelector<T>(selector);
  if (!element) throw new Error(`missing element ${selector}`);
  return element;
}

window.addEventListener("DOMContentLoaded", () => {
  mountApp({
    canvas: required<HTMLCanvasElement>("#surface"),
    status: required<HTMLElement>("#status"),
    undoButton: required<HTMLButtonElement>("#undo"),
    clearButton: required<HTMLButtonElement>("#clear"),
    submitButton: required<HTMLButtonElement>("#submit"),
  });
});
