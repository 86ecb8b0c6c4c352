// Spawns the real game service for tests.  Each test file uses its own port
// so files can run in parallel workers without colliding.

import { ChildProcess, spawn } from 'node:child_process';

export interface RunningServer {
  base: string;
  stop: () => Promise<void>;
}

export async function startServer(port: number): Promise<RunningServer> {
  const child: ChildProcess = spawn(
    'llgames', ['serve', '--host', '127.0.0.1', '--port', String(port)],
    { stdio: ['ignore', 'pipe', 'pipe'] },
  );
  let log = '';
  child.stdout?.on('data', (chunk: Buffer) => { log += chunk.toString(); });
  child.stderr?.on('data', (chunk: Buffer) => { log += chunk.toString(); });

  const base = `http://127.0.0.1:${port}`;
  const deadline = Date.now() + 20000;
  for (;;) {
    if (child.exitCode !== null) {
      throw new Error(`service exited early (${child.exitCode}):\n${log}`);
    }
    try {
      const res = await fetch(`${base}/game/tree?formula=1`);
      if (res.ok) break;
    } catch {
      // not listening yet
    }
    if (Date.now() > deadline) {
      child.kill();
      throw new Error(`service did not come up on ${port}:\n${log}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 150));
  }

  const stop = (): Promise<void> => new Promise((resolve) => {
    child.once('exit', () => resolve());
    child.kill();
    setTimeout(() => { child.kill('SIGKILL'); resolve(); }, 5000).unref();
  });
  return { base, stop };
}
