/**
 * Bootstrap: pick the API base and a project, mount the editor.
 *
 * `?api=` overrides the API origin (default: same origin), `?project=` opens
 * a specific project id; otherwise the first listed project opens, or a new
 * one is created when the server has none.
 */

import { ApiClient } from "./api.js";
import { Editor } from "./editor.js";

async function boot(): Promise<void> {
  const params = new URLSearchParams(window.location.search);
  const base = params.get("api") ?? window.location.origin;
  const api = new ApiClient(base);
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");

  let projectId = params.get("project");
  if (!projectId) {
    const projects = await api.listProjects();
    if (projects.length > 0) {
      projectId = projects[0].id;
    } else {
      const created = await api.createProject("Untitled prototype");
      projectId = created.id;
    }
  }
  await Editor.open(api, root, projectId);
}

boot().catch((err) => {
  const root = document.getElementById("app");
  if (root) {
    root.textContent = `failed to start: ${err}`;
  }
  console.error(err);
});
