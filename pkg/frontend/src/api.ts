import type {
  DiffReport,
  Project,
  ProjectSummary,
  StageKey,
  Staleness,
  TutorResponse,
} from './types.js';

const API_BASE = 'http://127.0.0.1:8750';

export class ApiError extends Error {
  constructor(
    public code: string,
    message: string,
    public status: number,
    public details: unknown = {},
  ) {
    super(message);
  }
}

async function parseError(res: Response): Promise<never> {
  let code = 'HTTP_' + res.status;
  let message = res.statusText;
  let details: unknown = {};
  try {
    const body = await res.json();
    if (body && typeof body.code === 'string') {
      code = body.code;
      message = body.message ?? message;
      details = body.details ?? {};
    }
  } catch {
    // non-JSON error body; keep the status text
  }
  throw new ApiError(code, message, res.status, details);
}

export function createApi(base: string = API_BASE) {
  async function request<T>(path: string, init?: RequestInit): Promise<T> {
    const res = await fetch(base + path, init);
    if (!res.ok) await parseError(res);
    return res.json() as Promise<T>;
  }

  function post<T>(path: string, body?: unknown): Promise<T> {
    return request<T>(path, {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body ?? {}),
    });
  }

  return {
    base,

    createProject(body: { logline_draft?: string; title?: string }): Promise<Project> {
      return post('/projects', body);
    },

    listProjects(): Promise<ProjectSummary[]> {
      return request('/projects');
    },

    getProject(id: string): Promise<Project> {
      return request(`/projects/${id}`);
    },

    tutor(id: string, stage: StageKey, message: string): Promise<TutorResponse> {
      return post(`/projects/${id}/stages/${stage}/tutor`, { message });
    },

    generate(
      id: string,
      stage: StageKey,
      body: { seed?: number; count_hint?: number; style_notes?: string; expected_revision?: number } = {},
    ): Promise<Project> {
      return post(`/projects/${id}/stages/${stage}/generate`, body);
    },

    confirm(
      id: string,
      stage: StageKey,
      body: { payload?: unknown; expected_revision?: number } = {},
    ): Promise<Project> {
      return post(`/projects/${id}/stages/${stage}/confirm`, body);
    },

    cascade(
      id: string,
      stage: StageKey,
      body: { seed?: number; expected_revision?: number } = {},
    ): Promise<Project> {
      return post(`/projects/${id}/stages/${stage}/cascade`, body);
    },

    patchElement(
      id: string,
      elementId: string,
      patch: Record<string, unknown>,
      revision: number,
    ): Promise<Project> {
      return request(`/projects/${id}/elements/${elementId}`, {
        method: 'PATCH',
        headers: {
          'Content-Type': 'application/json',
          'If-Match-Revision': String(revision),
        },
        body: JSON.stringify(patch),
      });
    },

    staleness(id: string): Promise<Staleness> {
      return request(`/projects/${id}/staleness`);
    },

    diff(id: string, stage: StageKey): Promise<DiffReport> {
      return request(`/projects/${id}/diff/${stage}`);
    },

    async exportText(id: string, format: 'json' | 'screenplay'): Promise<string> {
      const res = await fetch(`${base}/projects/${id}/export?format=${format}`);
      if (!res.ok) await parseError(res);
      return res.text();
    },
  };
}

export type Api = ReturnType<typeof createApi>;
