import type { TutorTurn } from '../types.js';

export interface ChatPanel {
  element: HTMLElement;
  render(messages: TutorTurn[]): void;
}

/**
 * Tutor chat: message list plus input bar. The tutor asks and critiques;
 * nothing typed here ever edits the script, so the panel only needs the
 * send callback.
 */
export function createChatPanel(onSend: (text: string) => void): ChatPanel {
  const panel = document.createElement('div');
  panel.className = 'chat-panel';

  const list = document.createElement('ul');
  list.className = 'chat-messages';

  const form = document.createElement('form');
  form.className = 'chat-input';
  const input = document.createElement('input');
  input.type = 'text';
  input.placeholder = 'Ask the tutor about this step';
  const send = document.createElement('button');
  send.type = 'submit';
  send.textContent = 'Send';
  form.appendChild(input);
  form.appendChild(send);

  form.addEventListener('submit', (event) => {
    event.preventDefault();
    const text = input.value.trim();
    if (!text) return;
    input.value = '';
    onSend(text);
  });

  panel.appendChild(list);
  panel.appendChild(form);

  return {
    element: panel,
    render(messages: TutorTurn[]) {
      list.innerHTML = '';
      for (const message of messages) {
        const item = document.createElement('li');
        item.className = `chat-${message.role}`;
        item.textContent = message.text;
        list.appendChild(item);
      }
    },
  };
}
