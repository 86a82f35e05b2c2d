// Bootstrap: pick a scenario, start one session for this tab.

import { ApiClient } from "./api.js";
import { startSession } from "./app.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const client = new ApiClient("");

  const scenarios = await client.listScenarios();
  if (scenarios.length === 0) {
    root.textContent = "No scenarios loaded on the server.";
    return;
  }

  const picker = document.createElement("div");
  picker.className = "scenario-picker";
  const heading = document.createElement("h1");
  heading.textContent = "Venue dialogue study";
  picker.appendChild(heading);

  const select = document.createElement("select");
  for (const scenario of scenarios) {
    const option = document.createElement("option");
    option.value = scenario.id;
    option.textContent = `${scenario.id} (${scenario.max_rounds} rounds)`;
    select.appendChild(option);
  }
  picker.appendChild(select);

  const name = document.createElement("input");
  name.placeholder = "participant name (optional)";
  picker.appendChild(name);

  const start = document.createElement("button");
  start.textContent = "Start session";
  start.addEventListener("click", async () => {
    start.disabled = true;
    try {
      await startSession(client, root, select.value, name.value || undefined);
    } catch (error) {
      start.disabled = false;
      alert(`could not start the session: ${String(error)}`);
    }
  });
  picker.appendChild(start);
  root.textContent = "";
  root.appendChild(picker);
}

void boot();
