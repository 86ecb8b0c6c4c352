import { ArenaApi } from './api.js';
import { App } from './ui.js';

const base = new URLSearchParams(location.search).get('api')
  ?? 'http://127.0.0.1:8777';

const root = document.getElementById('app');
if (root) {
  const app = new App(root, new ArenaApi(base));
  void app.restore();
}
