import { spawn, type ChildProcess } from 'node:child_process';
import path from 'node:path';
import { fileURLToPath } from 'node:url';
import { SERVICE_URL } from './service';

const here = path.dirname(fileURLToPath(import.meta.url));
const repoRoot = path.resolve(here, '..', '..');

const BOOT = `
import sys
sys.path.insert(0, "src")
import uvicorn
from coopera.engine import Engine, resolve_provider
from coopera.service import create_app
from coopera.store import MemoryStore

engine = Engine(store=MemoryStore(), provider=resolve_provider(force_mock=True, mock_seed=0))
uvicorn.run(create_app(engine), host="127.0.0.1", port=8931, log_level="warning")
`;

let child: ChildProcess | undefined;

async function waitHealthy(): Promise<void> {
  const deadline = Date.now() + 30000;
  while (Date.now() < deadline) {
    try {
      const res = await fetch(`${SERVICE_URL}/healthz`);
      if (res.ok) return;
    } catch {
      // not up yet
    }
    if (child && child.exitCode !== null) {
      throw new Error(`service exited early with code ${child.exitCode}`);
    }
    await new Promise((resolve) => setTimeout(resolve, 200));
  }
  throw new Error('service did not become healthy within 30s');
}

export async function setup(): Promise<void> {
  child = spawn('python3', ['-c', BOOT], {
    cwd: repoRoot,
    stdio: ['ignore', 'inherit', 'inherit'],
  });
  await waitHealthy();
}

export async function teardown(): Promise<void> {
  if (child && child.exitCode === null) {
    child.kill('SIGTERM');
    await new Promise((resolve) => setTimeout(resolve, 300));
    if (child.exitCode === null) child.kill('SIGKILL');
  }
}
